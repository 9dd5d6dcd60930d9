"""Command-line front end.

Exit codes: 0 success, 1 runtime or verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import tempfile
from contextlib import contextmanager
from fractions import Fraction
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import analytics, harness, preimages
from .engine import Configuration, init_random, step, step_local

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_at_least(lo: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {value}")
        return value

    parse.__name__ = f"integer>={lo}"
    return parse


def parse_density(text: str):
    """``"p/q"`` gives an exact ``Fraction``; a decimal gives a ``float``."""
    try:
        value = Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a decimal or p/q, got {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return value


parse_density.__name__ = "density"


def _version() -> str:
    try:
        return version("fitraffic")
    except PackageNotFoundError:
        return "unknown"


@contextmanager
def _output(path: str | None):
    """Standard output, or a file replaced atomically on success."""
    if path is None or path == "-":
        yield sys.stdout
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fitraffic-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fitraffic",
        description="Deterministic Fukui-Ishibashi traffic automaton: simulation and exact flow.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="simulate on a ring and record flow per time step")
    p.add_argument("--m", type=_int_at_least(1), required=True, help="maximum speed")
    p.add_argument("--length", type=_int_at_least(1), required=True, help="number of sites L")
    p.add_argument("--density", type=parse_density, required=True, help="car density (decimal or p/q)")
    p.add_argument("--steps", type=_int_at_least(0), required=True, help="last time step recorded")
    p.add_argument("--seed", type=_int_at_least(0), default=0, help="seed (master seed with --runs > 1)")
    p.add_argument("--init", choices=("exact", "bernoulli"), default="exact",
                   help="exact: round(density*L) cars; bernoulli: independent sites")
    p.add_argument("--runs", type=_int_at_least(1), default=1, help="ensemble size")
    p.add_argument("--workers", type=_int_at_least(1), default=1, help="processes for ensembles")
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")

    p = sub.add_parser("exact", help="evaluate the exact block probability and flow")
    p.add_argument("--m", type=_int_at_least(1), required=True)
    p.add_argument("--density", type=parse_density, required=True)
    p.add_argument("--steps", type=_int_at_least(0), default=0, help="rows for t = 0 .. steps")
    p.add_argument("--formula", choices=("sum", "hypergeometric", "asymptotic", "steady"), default="sum")
    p.add_argument("--out", default=None)

    p = sub.add_parser("preimage", help="count, list or verify preimages of 0^(m+1)")
    p.add_argument("--m", type=_int_at_least(1), required=True)
    p.add_argument("--n", type=_int_at_least(0), required=True, help="number of steps")
    p.add_argument("--action", choices=("count", "list", "verify"), default="count")
    p.add_argument("--out", default=None)

    p = sub.add_parser("diagram", help="fundamental diagram over an evenly spaced density grid")
    p.add_argument("--m", type=_int_at_least(1), required=True)
    p.add_argument("--t", type=_int_at_least(0), required=True, help="time step")
    p.add_argument("--rho-min", type=parse_density, required=True)
    p.add_argument("--rho-max", type=parse_density, required=True)
    p.add_argument("--rho-count", type=_int_at_least(1), required=True)
    p.add_argument("--simulate", action="store_true", help="add simulated flow and stderr columns")
    p.add_argument("--length", type=_int_at_least(1), default=10_000)
    p.add_argument("--seed", type=_int_at_least(0), default=0)
    p.add_argument("--runs", type=_int_at_least(1), default=10)
    p.add_argument("--init", choices=("exact", "bernoulli"), default="exact")
    p.add_argument("--workers", type=_int_at_least(1), default=1)
    p.add_argument("--out", default=None)

    p = sub.add_parser("verify", help="run the built-in identity checks")
    p.add_argument("--suite", choices=("all", "prop1", "prop2", "formulas"), default="all")
    return parser


def _cmd_simulate(args) -> int:
    if args.runs == 1:
        table = harness.run_series(args.length, args.m, args.density, args.seed, args.init, args.steps)
    else:
        table = harness.ensemble(args.length, args.m, args.density, args.seed, args.init,
                                 args.steps, args.runs, args.workers)
    with _output(args.out) as fh:
        harness.emit_table(table, fh)
    return EXIT_OK


def _cmd_exact(args) -> int:
    m, rho, fmt = args.m, args.density, harness.format_value
    rows = []
    if args.formula == "steady":
        rows.append(("inf", analytics.steady_block_prob(m, rho), analytics.steady_flow(m, rho)))
    elif args.formula == "asymptotic":
        if rho in (0, 1):
            raise UsageError("argument --density: asymptotic formula needs 0 < density < 1")
        for t in range(1, args.steps + 1):
            p = analytics.asymptotic_block_prob(m, t, rho)
            rows.append((t, p, 1 - float(rho) - p))
    else:
        for t in range(args.steps + 1):
            if args.formula == "sum":
                p = analytics.exact_block_prob(m, t, rho)
                phi = analytics.exact_flow(m, t, rho)
            else:
                phi = analytics.hypergeometric_flow(m, t, rho)
                p = 1 - rho - phi
            rows.append((t, p, phi))
    with _output(args.out) as fh:
        fh.write("t,P,flow\n")
        for t, p, phi in rows:
            fh.write(f"{t},{fmt(p)},{fmt(phi)}\n")
    return EXIT_OK


def _cmd_preimage(args) -> int:
    m, n = args.m, args.n
    if args.action == "count":
        with _output(args.out) as fh:
            fh.write(f"{preimages.preimage_count(m, n)}\n")
        return EXIT_OK
    try:
        preimages.check_exhaustive((n + 1) * (m + 1))
    except ValueError as exc:
        raise UsageError(f"argument --n: {exc}") from None
    if args.action == "list":
        with _output(args.out) as fh:
            for bits in preimages.iter_preimages(m, n):
                fh.write(bits + "\n")
        return EXIT_OK
    report = harness.verify_proposition2(m, n)
    with _output(args.out) as fh:
        harness.emit_table(report, fh)
    return EXIT_OK if report.mismatches == 0 else EXIT_FAIL


def _density_grid(lo, hi, count):
    if count == 1:
        if lo != hi:
            raise UsageError("argument --rho-count: a single point needs --rho-min == --rho-max")
        return [lo]
    if hi <= lo:
        raise UsageError("argument --rho-max: grid is empty or inverted (need rho-max > rho-min)")
    if isinstance(lo, Fraction) and isinstance(hi, Fraction):
        return [lo + (hi - lo) * i / (count - 1) for i in range(count)]
    return [float(x) for x in np.linspace(float(lo), float(hi), count)]


def _cmd_diagram(args) -> int:
    grid = _density_grid(args.rho_min, args.rho_max, args.rho_count)
    simulate = None
    if args.simulate:
        simulate = {"L": args.length, "seed": args.seed, "runs": args.runs,
                    "init": args.init, "workers": args.workers}
    table = harness.fundamental_diagram(args.m, args.t, grid, simulate)
    with _output(args.out) as fh:
        harness.emit_table(table, fh)
    return EXIT_OK


def _suite_prop1():
    rng = random.Random(20241)
    for m in (1, 2, 3):
        bad = 0
        for _ in range(300):
            L = rng.randint(4, 64)
            cfg = Configuration(rng.getrandbits(L), L)
            bad += harness.verify_proposition1(cfg, m) != 0
        yield f"flow identity on 300 random rings, m={m}", bad == 0
    for m in (1, 2, 3):
        bad = 0
        for L in range(m + 2, 13):
            for bits in range(1 << L):
                cfg = Configuration(bits, L)
                bad += step(cfg, m) != step_local(cfg, m)
        yield f"site-local update equals car update, all rings L<=12, m={m}", bad == 0
    cfg = init_random(10_000, 0.3, 7)
    yield "flow identity on a random ring L=10000, m=3", harness.verify_proposition1(cfg, 3) == 0


def _suite_prop2():
    for m, n in [(1, 0), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1)]:
        report = harness.verify_proposition2(m, n)
        counted = preimages.preimage_count(m, n)
        ok = report.mismatches == 0 and report.preimages == counted
        yield f"admissible <=> preimage, m={m} n={n} ({report.total} strings)", ok


def _suite_formulas():
    grid = [Fraction(1, 10), Fraction(1, 3), Fraction(1, 2), Fraction(9, 10)]
    for m in (1, 2):
        ok = all(
            preimages.preimage_prob_sum(m, n, rho) == analytics.exact_block_prob(m, n, rho)
            for n in range(4)
            for rho in grid
        )
        yield f"preimage sum == closed-form sum, m={m}, n<=3", ok
    for m in (1, 2, 3):
        ok = all(
            analytics.hypergeometric_flow(m, t, rho) == analytics.exact_flow(m, t, rho)
            for t in range(0, 31)
            for rho in grid
        )
        yield f"2F1 flow == summed flow (exact), m={m}, t<=30", ok


SUITES = {"prop1": _suite_prop1, "prop2": _suite_prop2, "formulas": _suite_formulas}


def _cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = 0
    for name in names:
        for label, ok in SUITES[name]():
            print(f"{'PASS' if ok else 'FAIL'} [{name}] {label}", flush=True)
            failed += not ok
    return EXIT_OK if failed == 0 else EXIT_FAIL


COMMANDS = {
    "simulate": _cmd_simulate,
    "exact": _cmd_exact,
    "preimage": _cmd_preimage,
    "diagram": _cmd_diagram,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"fitraffic {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fitraffic {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
