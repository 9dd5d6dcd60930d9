"""Preimages of the empty block ``0^(m+1)``.

A binary string of length ``(n+1)(m+1)`` evolves, after ``n`` steps and
inside its light cone, into ``0^(m+1)`` exactly when it is *m-admissible*:
walking left to right with a capital that gains 1 per ``0`` and loses ``m``
per ``1``, the capital stays strictly positive.  Admissible strings with
``n0`` zeros and ``n1`` ones correspond to lattice paths that stay strictly
below the line ``x = m y``, counted by a ballot-type formula.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import Iterator

__all__ = [
    "MAX_EXHAUSTIVE_LENGTH",
    "check_exhaustive",
    "is_admissible",
    "is_admissible_density",
    "path_count",
    "preimage_count",
    "iter_preimages",
    "enumerate_preimages",
    "preimage_prob_sum",
    "windowed_evolve",
    "brute_force_is_preimage",
    "write_golden",
    "read_golden",
]

MAX_EXHAUSTIVE_LENGTH = 32


def _check_bits(bits: str) -> None:
    if not bits:
        raise ValueError("bit string must be nonempty")
    if set(bits) - {"0", "1"}:
        raise ValueError(f"bit string may only contain 0 and 1, got {bits!r}")


def _check_m(m: int) -> None:
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be an integer >= 1, got {m!r}")


def window_length(m: int, n: int) -> int:
    _check_m(m)
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be an integer >= 0, got {n!r}")
    return (n + 1) * (m + 1)


def is_admissible(bits: str, m: int) -> bool:
    """Capital walk: +1 per ``0``, ``-m`` per ``1``, must stay > 0 after every prefix."""
    _check_bits(bits)
    _check_m(m)
    capital = 0
    for ch in bits:
        capital += 1 if ch == "0" else -m
        if capital <= 0:
            return False
    return True


def is_admissible_density(bits: str, m: int) -> bool:
    """Same predicate phrased as ``sum(a_1..a_k) < k / (m+1)`` for every prefix."""
    _check_bits(bits)
    _check_m(m)
    ones = 0
    for k, ch in enumerate(bits, start=1):
        ones += ch == "1"
        if ones * (m + 1) >= k:
            return False
    return True


def path_count(n0: int, n1: int, m: int) -> int:
    """Number of admissible strings with ``n0`` zeros and ``n1`` ones.

    ``(n0 - m n1) / (n0 + n1) * C(n0 + n1, n1)`` when ``n0 > m n1``, else 0.
    """
    _check_m(m)
    if n0 < 0 or n1 < 0:
        raise ValueError("n0 and n1 must be nonnegative")
    if n0 + n1 < 1:
        raise ValueError("need n0 + n1 >= 1")
    if n0 <= m * n1:
        return 0
    num = (n0 - m * n1) * math.comb(n0 + n1, n1)
    count, rem = divmod(num, n0 + n1)
    assert rem == 0, (n0, n1, m)
    return count


def preimage_count(m: int, n: int) -> int:
    """Number of ``n``-step preimages of ``0^(m+1)``, from the path-count formula."""
    p = window_length(m, n)
    return sum(path_count(n0, p - n0, m) for n0 in range(m * (n + 1) + 1, p + 1))


def check_exhaustive(p: int) -> None:
    if p > MAX_EXHAUSTIVE_LENGTH:
        raise ValueError(
            f"window length {p} exceeds the exhaustive limit {MAX_EXHAUSTIVE_LENGTH}"
        )


def iter_preimages(m: int, n: int) -> Iterator[str]:
    """Admissible strings of length ``(n+1)(m+1)`` in lexicographic order.

    Depth-first over prefixes, pruned as soon as the capital hits zero.
    """
    p = window_length(m, n)
    check_exhaustive(p)
    stack = [("", 0)]
    while stack:
        prefix, capital = stack.pop()
        if len(prefix) == p:
            yield prefix
            continue
        # push "1" first so "0" pops first
        if capital - m > 0:
            stack.append((prefix + "1", capital - m))
        stack.append((prefix + "0", capital + 1))


def enumerate_preimages(m: int, n: int) -> list[str]:
    return list(iter_preimages(m, n))


def preimage_prob_sum(m: int, n: int, rho):
    """Probability of a random window being a preimage: ``sum rho^#1 (1-rho)^#0``.

    Exact for rational ``rho``.
    """
    if not 0 <= rho <= 1:
        raise ValueError(f"rho must lie in [0, 1], got {rho!r}")
    if not isinstance(rho, float):
        rho = Fraction(rho)
    p = window_length(m, n)
    ones = Counter(s.count("1") for s in iter_preimages(m, n))
    return sum(
        (k * rho**n1 * (1 - rho) ** (p - n1) for n1, k in sorted(ones.items())),
        Fraction(0) if isinstance(rho, Fraction) else 0.0,
    )


def _evolve_once(sites: list[int], m: int) -> list[int]:
    p = len(sites)
    out = [0] * p
    cars = [i for i, s in enumerate(sites) if s]
    for a, x in enumerate(cars):
        if a + 1 < len(cars):
            v = min(cars[a + 1] - x - 1, m)
        elif p - 1 - x >= m:
            v = m
        else:
            # velocity not fixed by the window; the car lands at or past p - 1,
            # outside the retained range
            continue
        if x + v < p:
            out[x + v] = 1
    return out[m : p - 1]


def windowed_evolve(bits: str, m: int, steps: int) -> str:
    """Evolve a finite segment keeping only sites fully determined by it.

    Each step drops ``m`` sites on the left and one on the right.
    """
    _check_bits(bits)
    _check_m(m)
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if len(bits) <= steps * (m + 1):
        raise ValueError(
            f"segment of length {len(bits)} too short for {steps} steps with m={m}"
        )
    sites = [int(c) for c in bits]
    for _ in range(steps):
        sites = _evolve_once(sites, m)
    return "".join(map(str, sites))


def brute_force_is_preimage(bits: str, m: int, n: int) -> bool:
    """Oracle: does the window evolve into ``0^(m+1)`` after ``n`` steps?"""
    if len(bits) != window_length(m, n):
        raise ValueError(f"expected length {(n + 1) * (m + 1)}, got {len(bits)}")
    return windowed_evolve(bits, m, n) == "0" * (m + 1)


def write_golden(path, m: int, n: int) -> None:
    lines = [f"# m={m} n={n}", *iter_preimages(m, n)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_golden(path) -> tuple[int, int, list[str]]:
    header, *rest = Path(path).read_text(encoding="ascii").splitlines()
    fields = dict(kv.split("=") for kv in header.lstrip("# ").split())
    return int(fields["m"]), int(fields["n"]), [line for line in rest if line]
