"""Closed-form block probability and flow of the deterministic model.

Every function accepts the density either as an exact rational
(``int``/``fractions.Fraction``), in which case the result is an exact
``Fraction``, or as a ``float``, which selects a floating-point path.
Internally ``T = t + 1`` and ``M = m + 1``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = [
    "exact_block_prob",
    "exact_flow",
    "hypergeometric_flow",
    "hyp2f1_terminating",
    "steady_block_prob",
    "steady_flow",
    "asymptotic_block_prob",
]


def _check(m, t, rho, t_min=0):
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ValueError(f"m must be an integer >= 1, got {m!r}")
    if t is not None and (isinstance(t, bool) or not isinstance(t, int) or t < t_min):
        raise ValueError(f"t must be an integer >= {t_min}, got {t!r}")
    if not 0 <= rho <= 1:
        raise ValueError(f"rho must lie in [0, 1], got {rho!r}")


def _is_exact(rho) -> bool:
    return isinstance(rho, Rational)


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def exact_block_prob(m: int, t: int, rho):
    """Probability of ``m + 1`` consecutive empty sites after ``t`` steps.

    Starting from a Bernoulli(rho) configuration,

        P = sum_{j=1}^{T} (j/T) C(M T, T - j) rho^(T-j) (1-rho)^(m T + j)

    with ``0**0 == 1``.
    """
    _check(m, t, rho)
    T = t + 1
    n = (m + 1) * T
    if _is_exact(rho):
        rho = Fraction(rho)
        a, b = rho.numerator, rho.denominator
        # every term shares the denominator T * b**n
        num = sum(
            j * math.comb(n, T - j) * a ** (T - j) * (b - a) ** (m * T + j)
            for j in range(1, T + 1)
        )
        return Fraction(num, T * b**n)

    rho = float(rho)
    if rho == 0.0:
        return 1.0
    if rho == 1.0:
        return 0.0
    lr, lq = math.log(rho), math.log1p(-rho)
    terms = [
        j / T * math.exp(_log_comb(n, T - j) + (T - j) * lr + (m * T + j) * lq)
        for j in range(1, T + 1)
    ]
    return math.fsum(terms)


def exact_flow(m: int, t: int, rho):
    """Average flow at time ``t``: ``1 - rho - P_t``."""
    p = exact_block_prob(m, t, rho)
    if _is_exact(rho):
        return 1 - Fraction(rho) - p
    return max(0.0, 1.0 - float(rho) - p)


def hyp2f1_terminating(a, b: int, c, z):
    """Gauss 2F1(a, b; c; z) for a nonpositive integer ``b`` (finite sum).

    Exact when all arguments are rational.
    """
    if not isinstance(b, int) or b > 0:
        raise ValueError("upper parameter b must be a nonpositive integer")
    term = Fraction(1) if all(_is_exact(x) for x in (a, c, z)) else 1.0
    total = term
    for k in range(-b):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
    return total


def hypergeometric_flow(m: int, t: int, rho):
    """Flow at time ``t`` written with a terminating Gauss 2F1.

        phi = 1 - rho - pref * 2F1(2, -t; 2 + m + m t; 1 - 1/rho)
        pref = (1-rho)^(1+m+m t) rho^t (1+m+t+m t)! / ((1+m+m t) (1+t)! (m+m t)!)

    ``rho == 0`` returns the limiting value 0 instead of touching the
    singular argument.
    """
    _check(m, t, rho)
    c = 2 + m + m * t
    if rho == 0:
        return Fraction(0) if _is_exact(rho) else 0.0
    if _is_exact(rho):
        rho = Fraction(rho)
        pref = Fraction(
            math.factorial(1 + m + t + m * t),
            (1 + m + m * t) * math.factorial(1 + t) * math.factorial(m + m * t),
        ) * (1 - rho) ** (1 + m + m * t) * rho**t
        return 1 - rho - pref * hyp2f1_terminating(2, -t, c, 1 - 1 / rho)

    rho = float(rho)
    if rho == 1.0:
        return 0.0
    # rho^t z^k = rho^(t-k) (rho-1)^k and (-t)_k z^k > 0, so every term is
    # positive; accumulate in log space to dodge overflow of the factorials
    lr, lq = math.log(rho), math.log1p(-rho)
    log_pref = (
        (1 + m + m * t) * lq
        + math.lgamma(2 + m + t + m * t)
        - math.log(1 + m + m * t)
        - math.lgamma(2 + t)
        - math.lgamma(1 + m + m * t)
    )
    terms = []
    for k in range(t + 1):
        # (2)_k = (k+1)!, |(-t)_k| = t!/(t-k)!, (c)_k = Gamma(c+k)/Gamma(c)
        log_coef = (
            math.lgamma(k + 2)
            + math.lgamma(t + 1)
            - math.lgamma(t - k + 1)
            - (math.lgamma(c + k) - math.lgamma(c))
            - math.lgamma(k + 1)
        )
        terms.append(math.exp(log_pref + log_coef + (t - k) * lr + k * lq))
    return max(0.0, 1.0 - rho - math.fsum(terms))


def steady_block_prob(m: int, rho):
    """``t -> infinity`` limit: ``1 - (m+1) rho`` below ``rho = 1/(m+1)``, else 0."""
    _check(m, None, rho)
    if (m + 1) * rho < 1:
        return 1 - (m + 1) * rho
    return Fraction(0) if _is_exact(rho) else 0.0


def steady_flow(m: int, rho):
    """Steady-state fundamental diagram: ``m rho`` in free flow, ``1 - rho`` when jammed."""
    _check(m, None, rho)
    if (m + 1) * rho < 1:
        return m * rho
    return 1 - rho


def asymptotic_block_prob(m: int, t: int, rho: float) -> float:
    """Normal-approximation estimate of the block probability for large ``t``.

    Replaces the binomial weights by a Gaussian and the sum by an integral,
    which integrates to two exponentials plus two error functions.  Not exact;
    the error vanishes as ``t`` grows.  Result clamped to ``[0, 1]``.
    """
    _check(m, t, rho, t_min=1)
    if rho in (0, 1):
        raise ValueError("asymptotic form needs 0 < rho < 1 (variance vanishes otherwise)")
    rho = float(rho)
    T, M = t + 1, m + 1
    var = M * T * rho * (1 - rho)
    scale = math.sqrt(2 * var)
    upper = 1 - T + M * rho * T
    exp_part = math.sqrt(M * rho * (1 - rho) / (2 * math.pi * T)) * (
        math.exp(-(upper**2) / (2 * var)) - math.exp(-M * rho * T / (2 * (1 - rho)))
    )
    erf_part = 0.5 * (1 - M * rho) * (math.erf(M * rho * T / scale) - math.erf(upper / scale))
    return min(1.0, max(0.0, exp_part + erf_part))
