"""Ring-lattice configurations and the deterministic Fukui-Ishibashi update.

A configuration of ``L`` sites is stored bit-packed in a Python integer:
bit ``i`` is site ``i`` (site 0 is the leftmost character of the textual
form).  Cars travel towards increasing site index and wrap around the ring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational

import numpy as np

__all__ = [
    "ModelParams",
    "Configuration",
    "exact_car_count",
    "init_random",
    "step",
    "step_local",
    "velocities",
    "flow",
    "block_count",
    "block_frequency",
]

INIT_MODES = ("exact", "bernoulli")


@dataclass(frozen=True)
class ModelParams:
    """Maximum speed ``m`` in cells per step."""

    m: int

    def __post_init__(self):
        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < 1:
            raise ValueError(f"maximum speed m must be an integer >= 1, got {self.m!r}")


def _params(params: ModelParams | int) -> ModelParams:
    return params if isinstance(params, ModelParams) else ModelParams(params)


@dataclass(frozen=True)
class Configuration:
    """Immutable ring of ``length`` binary sites packed into ``bits``."""

    bits: int
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("lattice length must be >= 1")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits do not fit the lattice length")

    @classmethod
    def from_string(cls, text: str) -> Configuration:
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"configuration literal must be a nonempty 0/1 string, got {text!r}")
        # reversed so that the first character lands in bit 0
        return cls(int(text[::-1], 2), len(text))

    @classmethod
    def from_array(cls, sites) -> Configuration:
        arr = np.asarray(sites, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("sites must be a nonempty 1-d sequence")
        if np.any(arr > 1):
            raise ValueError("site values must be 0 or 1")
        packed = np.packbits(arr, bitorder="little")
        return cls(int.from_bytes(packed.tobytes(), "little"), int(arr.size))

    @classmethod
    def from_positions(cls, positions, length: int) -> Configuration:
        arr = np.zeros(length, dtype=np.uint8)
        arr[np.asarray(positions, dtype=np.int64)] = 1
        return cls.from_array(arr)

    def __str__(self) -> str:
        return format(self.bits, f"0{self.length}b")[::-1]

    def __len__(self) -> int:
        return self.length

    @property
    def mask(self) -> int:
        return (1 << self.length) - 1

    @property
    def car_count(self) -> int:
        return self.bits.bit_count()

    @property
    def density(self) -> Fraction:
        return Fraction(self.car_count, self.length)

    def to_array(self) -> np.ndarray:
        nbytes = (self.length + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.length]

    @cached_property
    def positions(self) -> np.ndarray:
        """Sorted site indices of the cars."""
        return np.flatnonzero(self.to_array())


def _shift(bits: int, k: int, length: int) -> int:
    """Rotate so that bit ``i`` of the result is site ``i + k`` (mod length)."""
    k %= length
    if k == 0:
        return bits
    mask = (1 << length) - 1
    return ((bits >> k) | (bits << (length - k))) & mask


def exact_car_count(L: int, rho) -> int:
    """``round(rho * L)`` with halves rounded up."""
    if isinstance(rho, Rational):
        return math.floor(Fraction(rho) * L + Fraction(1, 2))
    return math.floor(rho * L + 0.5)


def init_random(L: int, rho, seed, mode: str = "exact") -> Configuration:
    """Random initial configuration.

    ``mode="exact"`` places exactly ``round(rho * L)`` cars (halves round up)
    at uniformly chosen distinct sites; ``mode="bernoulli"`` occupies each
    site independently with probability ``rho``.  The generator is numpy's
    PCG64 seeded with ``seed`` (an int or a ``numpy.random.SeedSequence``).
    """
    if isinstance(L, bool) or not isinstance(L, int) or L < 1:
        raise ValueError(f"lattice length must be an integer >= 1, got {L!r}")
    if not 0 <= rho <= 1:
        raise ValueError(f"density must lie in [0, 1], got {rho!r}")
    if mode not in INIT_MODES:
        raise ValueError(f"unknown init mode {mode!r}; expected one of {INIT_MODES}")
    rng = np.random.Generator(np.random.PCG64(seed))
    if mode == "exact":
        sites = np.zeros(L, dtype=np.uint8)
        sites[rng.choice(L, size=exact_car_count(L, rho), replace=False)] = 1
    else:
        sites = (rng.random(L) < float(rho)).astype(np.uint8)
    return Configuration.from_array(sites)


def _gaps(config: Configuration) -> np.ndarray:
    pos = config.positions
    if pos.size == 0:
        return pos
    # a lone car sees its own site as the next car: gap L - 1
    return (np.roll(pos, -1) - pos - 1) % config.length


def step(config: Configuration, params: ModelParams | int) -> Configuration:
    """Advance every car by ``min(gap, m)`` sites simultaneously."""
    m = _params(params).m
    pos = config.positions
    if pos.size == 0 or pos.size == config.length:
        return config
    new = (pos + np.minimum(_gaps(config), m)) % config.length
    return Configuration.from_positions(new, config.length)


def step_local(config: Configuration, params: ModelParams | int) -> Configuration:
    """Synchronous site-local update over the window ``i-m .. i+1``.

    Site ``i`` is occupied next step iff

    * it holds a car that is blocked (site ``i+1`` occupied), or
    * it is empty, site ``i+1`` is occupied and some car sits in ``i-m .. i-1``
      (the nearest such car has gap ``<= m`` and stops exactly at ``i``), or
    * it is empty, site ``i+1`` is empty, site ``i-m`` holds a car and
      ``i-m+1 .. i-1`` are empty (that car jumps the full ``m`` cells).

    Evaluated bit-parallel on the packed ring.
    """
    m = _params(params).m
    L = config.length
    if L < m + 2:
        raise ValueError(f"step_local needs L >= m + 2 = {m + 2}, got L = {L}")
    mask = config.mask
    s = config.bits
    empty = ~s & mask
    ahead = _shift(s, 1, L)

    behind_any = 0
    gap_clear = empty  # sites i-m+1 .. i all empty
    for d in range(1, m + 1):
        behind_any |= _shift(s, -d, L)
        if d < m:
            gap_clear &= _shift(empty, -d, L)

    stay = s & ahead
    stop_behind = empty & ahead & behind_any
    full_jump = gap_clear & ~ahead & _shift(s, -m, L)
    return Configuration((stay | stop_behind | full_jump) & mask, L)


def velocities(config: Configuration, params: ModelParams | int) -> tuple[int, ...]:
    """``min(gap, m)`` per car, ordered by site index."""
    m = _params(params).m
    if config.car_count == 0:
        raise ValueError("velocities undefined for a configuration without cars")
    return tuple(int(v) for v in np.minimum(_gaps(config), m))


def flow(config: Configuration, params: ModelParams | int) -> Fraction:
    """Average flow ``(1/L) * sum of velocities``; zero when there are no cars."""
    m = _params(params).m
    if config.car_count == 0:
        return Fraction(0)
    total = int(np.minimum(_gaps(config), m).sum())
    return Fraction(total, config.length)


def block_count(config: Configuration, pattern: str) -> int:
    """Occurrences of ``pattern`` over all ``L`` ring start positions (overlaps counted)."""
    if not pattern:
        raise ValueError("pattern must be nonempty")
    if set(pattern) - {"0", "1"}:
        raise ValueError(f"pattern must be a 0/1 string, got {pattern!r}")
    L = config.length
    if len(pattern) > L:
        raise ValueError(f"pattern of length {len(pattern)} exceeds lattice length {L}")
    empty = ~config.bits & config.mask
    hits = config.mask
    for j, ch in enumerate(pattern):
        hits &= _shift(config.bits if ch == "1" else empty, j, L)
    return hits.bit_count()


def block_frequency(config: Configuration, pattern: str) -> Fraction:
    return Fraction(block_count(config, pattern), config.length)
