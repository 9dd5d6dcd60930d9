import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from fitraffic.analytics import (
    asymptotic_block_prob,
    exact_block_prob,
    exact_flow,
    hyp2f1_terminating,
    hypergeometric_flow,
    steady_block_prob,
    steady_flow,
)
from fitraffic.engine import Configuration, block_count, step

F = Fraction


def ring_average_block_prob(m, t, rho):
    """Oracle: average the ``0^(m+1)`` frequency at time ``t`` over every ring of
    length ``(t+1)(m+1)`` weighted by its Bernoulli(rho) probability.

    The block's dependence window fits on such a ring without overlap, so the
    average equals the infinite-lattice probability.
    """
    L = (t + 1) * (m + 1)
    total = F(0)
    for bits in range(1 << L):
        cfg = Configuration(bits, L)
        n = cfg.car_count
        weight = rho**n * (1 - rho) ** (L - n)
        for _ in range(t):
            cfg = step(cfg, m)
        total += weight * F(block_count(cfg, "0" * (m + 1)), L)
    return total


ORACLE_CASES = [(1, 0), (1, 1), (1, 2), (1, 3), (1, 4), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1), (4, 1)]


@pytest.mark.parametrize("m,t", ORACLE_CASES)
@pytest.mark.parametrize("rho", [F(1, 2), F(1, 3), F(4, 5)])
def test_exact_block_prob_against_ring_oracle(m, t, rho):
    assert exact_block_prob(m, t, rho) == ring_average_block_prob(m, t, rho)


def test_exact_block_prob_examples():
    assert exact_block_prob(2, 0, 0.3) == pytest.approx(0.343, rel=1e-14)
    assert exact_block_prob(2, 0, F(3, 10)) == F(343, 1000)
    assert exact_block_prob(1, 1, F(1, 2)) == F(3, 16)
    for m in (1, 2, 5):
        for t in (0, 3, 40):
            assert exact_block_prob(m, t, 0) == 1
            assert exact_block_prob(m, t, 0.0) == 1.0
            assert exact_block_prob(m, t, 1) == 0
            assert exact_block_prob(m, t, 1.0) == 0.0


@pytest.mark.parametrize("bad", [(0, 1, 0.5), (1, -1, 0.5), (1, 1, -0.01), (1, 1, 1.01), (1.5, 1, 0.5)])
def test_exact_block_prob_rejects(bad):
    with pytest.raises(ValueError):
        exact_block_prob(*bad)


def test_float_path_matches_rational_path():
    for m in (1, 2, 3):
        for t in (0, 1, 10, 57, 200):
            for rho in (F(1, 20), F(1, 5), F(1, 3), F(1, 2), F(7, 10)):
                exact = exact_block_prob(m, t, rho)
                if exact < F(1, 10**290):
                    continue
                approx = exact_block_prob(m, t, float(rho))
                assert abs(approx - float(exact)) <= 1e-10 * float(exact), (m, t, rho)


def test_exact_flow_examples():
    assert exact_flow(1, 1, F(1, 2)) == F(5, 16)
    for m in (1, 3):
        for t in (0, 5):
            assert exact_flow(m, t, 0) == 0
            assert exact_flow(m, t, 1) == 0
            assert exact_flow(m, t, 0.0) == 0.0


@given(st.integers(1, 4), st.integers(0, 60), st.fractions(0, 1, max_denominator=50))
@settings(max_examples=100, deadline=None)
def test_flow_bounds(m, t, rho):
    p = exact_block_prob(m, t, rho)
    phi = exact_flow(m, t, rho)
    assert 0 <= p <= 1
    assert 0 <= phi <= 1 - rho


@given(st.integers(1, 6), st.fractions(0, 1, max_denominator=100))
def test_flow_at_time_zero(m, rho):
    assert exact_flow(m, 0, rho) == 1 - rho - (1 - rho) ** (m + 1)


def test_hyp2f1_terminating_small():
    # 2F1(2, -1; 4; z) = 1 - z/2
    assert hyp2f1_terminating(2, -1, 4, F(-1)) == F(3, 2)
    assert hyp2f1_terminating(2, 0, 7, F(5)) == 1
    # Chu-Vandermonde: 2F1(a, -n; c; 1) = (c-a)_n / (c)_n
    a, n, c = F(2), 5, F(9)
    rising = lambda x, k: math.prod(x + i for i in range(k))
    assert hyp2f1_terminating(a, -n, c, F(1)) == F(rising(c - a, n)) / rising(c, n)
    with pytest.raises(ValueError):
        hyp2f1_terminating(2, 1, 3, F(1))


def test_hypergeometric_flow_examples():
    assert hypergeometric_flow(2, 0, 0.3) == pytest.approx(0.357, rel=1e-12)
    assert hypergeometric_flow(1, 1, F(1, 2)) == F(5, 16)
    assert hypergeometric_flow(2, 100, F(1, 3)) == exact_flow(2, 100, F(1, 3))
    a, b = hypergeometric_flow(2, 100, 1 / 3), exact_flow(2, 100, 1 / 3)
    assert abs(a - b) <= 1e-9 * b
    assert hypergeometric_flow(3, 4, 0) == 0
    assert hypergeometric_flow(3, 4, 0.0) == 0.0
    assert hypergeometric_flow(3, 4, 1) == 0


@pytest.mark.parametrize("m", [1, 2, 3])
def test_hypergeometric_equals_sum_exactly(m):
    for t in range(0, 25):
        for rho in (F(1, 10), F(1, 3), F(1, 2), F(9, 10), F(17, 23)):
            assert hypergeometric_flow(m, t, rho) == exact_flow(m, t, rho)


def test_steady_state():
    assert steady_block_prob(2, F(1, 5)) == F(2, 5)
    assert steady_block_prob(2, 0.2) == pytest.approx(0.4)
    assert steady_block_prob(2, F(1, 3)) == 0
    assert steady_block_prob(2, 1 / 3) == 0
    assert steady_block_prob(1, 0.8) == 0
    assert steady_flow(2, F(1, 5)) == F(2, 5)
    assert steady_flow(2, 0.5) == 0.5
    assert steady_flow(1, F(1, 2)) == F(1, 2)
    for m in (1, 2, 3, 7):
        rc = F(1, m + 1)
        assert steady_flow(m, rc) == F(m, m + 1)
        assert steady_flow(m, rc - F(1, 10**6)) < F(m, m + 1)
        assert steady_flow(m, rc + F(1, 10**6)) < F(m, m + 1)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("rho", [0.05, 0.1, 0.15, 0.4, 0.6, 0.8])
def test_approach_to_steady_state(m, rho):
    rc = 1 / (m + 1)
    if abs(rho - rc) < 0.05:
        pytest.skip("too close to the critical density")
    assert abs(exact_block_prob(m, 400, rho) - steady_block_prob(m, rho)) < 0.02


def appendix_integral(m, t, rho):
    """Oracle for the erf closed form: numerically integrate the Gaussian-weighted integrand."""
    T, M = t + 1, m + 1
    var = M * T * rho * (1 - rho)
    f = lambda x: x / T / math.sqrt(2 * math.pi * var) * math.exp(-((T - x - M * T * rho) ** 2) / (2 * var))
    return quad(f, 1, T, limit=200, epsabs=1e-13)[0]


@pytest.mark.parametrize("m,t,rho", [(2, 50, 0.2), (2, 50, 0.5), (1, 10, 0.3), (3, 200, 0.25), (2, 5, 0.33)])
def test_asymptotic_matches_integral(m, t, rho):
    assert asymptotic_block_prob(m, t, rho) == pytest.approx(appendix_integral(m, t, rho), abs=1e-10)


def test_asymptotic_limits():
    assert abs(asymptotic_block_prob(2, 400, 0.2) - exact_block_prob(2, 400, 0.2)) < 0.01
    assert asymptotic_block_prob(2, 10**6, 0.2) == pytest.approx(0.4, abs=1e-9)
    assert asymptotic_block_prob(2, 10**6, 0.5) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        asymptotic_block_prob(2, 10, 0)
    with pytest.raises(ValueError):
        asymptotic_block_prob(2, 10, 1.0)
    with pytest.raises(ValueError):
        asymptotic_block_prob(2, 0, 0.3)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("rho", [0.1, 0.2, 0.5, 0.7])
def test_asymptotic_error_shrinks(m, rho):
    if abs(rho - 1 / (m + 1)) < 0.05:
        pytest.skip("critical")
    err = lambda t: abs(asymptotic_block_prob(m, t, rho) - exact_block_prob(m, t, rho))
    assert err(400) < err(50)
