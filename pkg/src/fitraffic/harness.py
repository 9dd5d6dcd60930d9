"""Monte Carlo runs, parameter sweeps and CSV tables."""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import analytics
from .engine import (
    Configuration,
    block_frequency,
    exact_car_count,
    flow,
    init_random,
    step,
    step_local,
)
from .preimages import check_exhaustive, brute_force_is_preimage, is_admissible, window_length

__all__ = [
    "FlowSeries",
    "EnsembleStats",
    "DiagramTable",
    "VerificationReport",
    "run_series",
    "ensemble",
    "run_seed",
    "fundamental_diagram",
    "verify_proposition1",
    "verify_proposition2",
    "emit_table",
    "format_value",
]


def format_value(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.12g}"


@dataclass
class FlowSeries:
    meta: dict
    rows: list[tuple[int, float, float]] = field(default_factory=list)

    columns = ("t", "flow_measured", "flow_exact")

    @property
    def measured(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows])

    @property
    def exact(self) -> np.ndarray:
        return np.array([r[2] for r in self.rows])


@dataclass
class EnsembleStats:
    meta: dict
    rows: list[tuple[int, float, float, float]] = field(default_factory=list)

    columns = ("t", "flow_mean", "flow_stderr", "flow_exact")

    @property
    def mean(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows])

    @property
    def stderr(self) -> np.ndarray:
        return np.array([r[2] for r in self.rows])

    @property
    def exact(self) -> np.ndarray:
        return np.array([r[3] for r in self.rows])


@dataclass
class DiagramTable:
    meta: dict
    rows: list[tuple] = field(default_factory=list)
    simulated: bool = False

    @property
    def columns(self) -> tuple[str, ...]:
        base = ("rho", "P_exact", "flow_exact")
        return base + ("flow_measured", "stderr") if self.simulated else base


@dataclass
class VerificationReport:
    m: int
    n: int
    total: int
    preimages: int
    mismatches: int

    columns = ("total", "preimages", "mismatches")
    meta: dict = field(default_factory=dict, init=False, repr=False)

    @property
    def comment(self) -> str:
        return f"m={self.m}, n={self.n}"

    @property
    def rows(self) -> list[tuple[int, int, int]]:
        return [(self.total, self.preimages, self.mismatches)]


def verify_proposition1(config: Configuration, m: int) -> Fraction:
    """``flow - (1 - N/L - freq(0^(m+1)))`` in exact arithmetic; zero for every configuration."""
    return flow(config, m) - (1 - config.density - block_frequency(config, "0" * (m + 1)))


def _advance(config: Configuration, m: int) -> Configuration:
    return step_local(config, m) if config.length >= m + 2 else step(config, m)


def run_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Seed for run ``index`` of an ensemble; depends only on the pair."""
    return np.random.SeedSequence(master_seed, spawn_key=(index,))


def run_series(
    L: int,
    m: int,
    rho,
    seed,
    init: str = "exact",
    T_max: int = 100,
) -> FlowSeries:
    """Simulate once and record the flow at ``t = 0 .. T_max`` (measured before each step).

    Each measured value is paired with the exact flow, evaluated at
    ``N/L`` for exact-count initialisation and at the requested density for
    Bernoulli initialisation.
    """
    if T_max < 0:
        raise ValueError("T_max must be >= 0")
    config = init_random(L, rho, seed, init)
    rho_actual = config.density
    rho_exact = float(rho_actual) if init == "exact" else float(rho)
    check_at = {0, T_max // 2, T_max}
    seed_repr = f"{seed.entropy}/{seed.spawn_key[0]}" if isinstance(seed, np.random.SeedSequence) else seed
    series = FlowSeries(
        meta={
            "L": L,
            "m": m,
            "rho_requested": format_value(rho),
            "rho_actual": format_value(rho_actual),
            "seed": seed_repr,
            "init": init,
            "T_max": T_max,
        }
    )
    for t in range(T_max + 1):
        if t in check_at and verify_proposition1(config, m) != 0:
            raise RuntimeError(f"flow identity violated at t={t}")
        series.rows.append(
            (t, float(flow(config, m)), float(analytics.exact_flow(m, t, rho_exact)))
        )
        if t < T_max:
            config = _advance(config, m)
    return series


def _series_for_index(args) -> np.ndarray:
    L, m, rho, master_seed, init, T_max, index = args
    return run_series(L, m, rho, run_seed(master_seed, index), init, T_max).measured


def ensemble(
    L: int,
    m: int,
    rho,
    master_seed: int,
    init: str = "exact",
    T_max: int = 100,
    runs: int = 10,
    workers: int | None = None,
) -> EnsembleStats:
    """Mean and standard error of the flow over ``runs`` independent runs.

    Run ``i`` is seeded from ``(master_seed, i)`` alone, so parallel and
    sequential execution give identical numbers.  The exact column uses
    ``N/L`` for exact-count runs (the same ``N`` in every run) and the
    requested density for Bernoulli runs.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    jobs = [(L, m, rho, master_seed, init, T_max, i) for i in range(runs)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_run = list(pool.map(_series_for_index, jobs))
    else:
        per_run = [_series_for_index(job) for job in jobs]
    data = np.vstack(per_run)
    mean = data.mean(axis=0)
    stderr = data.std(axis=0, ddof=1) / math.sqrt(runs) if runs > 1 else np.zeros(T_max + 1)
    rho_exact = exact_car_count(L, rho) / L if init == "exact" else float(rho)
    stats = EnsembleStats(
        meta={
            "L": L,
            "m": m,
            "rho_requested": format_value(rho),
            "master_seed": master_seed,
            "init": init,
            "T_max": T_max,
            "runs": runs,
        }
    )
    for t in range(T_max + 1):
        stats.rows.append(
            (t, float(mean[t]), float(stderr[t]), float(analytics.exact_flow(m, t, rho_exact)))
        )
    return stats


def fundamental_diagram(
    m: int,
    t: int,
    rho_grid,
    simulate: dict | None = None,
) -> DiagramTable:
    """Exact ``P_t`` and flow over a density grid, optionally with simulated flow.

    ``simulate`` takes ``L``, ``seed``, ``runs`` and optionally ``init``
    and ``workers``; density ``i`` of the grid uses master seed
    ``seed + i``.
    """
    grid = list(rho_grid)
    if not grid:
        raise ValueError("density grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("density grid must be strictly increasing")
    table = DiagramTable(meta={"m": m, "t": t}, simulated=simulate is not None)
    table.meta["grid"] = f"{format_value(grid[0])}..{format_value(grid[-1])} ({len(grid)} points)"
    if simulate is not None:
        table.meta.update({k: simulate[k] for k in ("L", "seed", "runs")})
    for i, rho in enumerate(grid):
        p = analytics.exact_block_prob(m, t, rho)
        phi = analytics.exact_flow(m, t, rho)
        row = (rho, p, phi)
        if simulate is not None:
            stats = ensemble(
                simulate["L"],
                m,
                rho,
                simulate["seed"] + i,
                simulate.get("init", "exact"),
                t,
                simulate["runs"],
                simulate.get("workers"),
            )
            row += (stats.mean[t], stats.stderr[t])
        table.rows.append(row)
    return table


def verify_proposition2(m: int, n: int) -> VerificationReport:
    """Classify every string of length ``(n+1)(m+1)`` by predicate and by oracle."""
    p = window_length(m, n)
    check_exhaustive(p)
    total = preimages = mismatches = 0
    for combo in itertools.product("01", repeat=p):
        bits = "".join(combo)
        predicted = is_admissible(bits, m)
        actual = brute_force_is_preimage(bits, m, n)
        total += 1
        preimages += actual
        mismatches += predicted != actual
    return VerificationReport(m, n, total, preimages, mismatches)


def emit_table(table, destination) -> None:
    """Write ``table`` as CSV: ``# key=value`` lines, a header, then data rows.

    ``destination`` is a path or a text stream.  Output bytes depend only on
    the table contents.
    """
    buf = io.StringIO()
    if getattr(table, "comment", None):
        buf.write(f"# {table.comment}\n")
    for key, value in table.meta.items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(x) for x in row])
    text = buf.getvalue()
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
