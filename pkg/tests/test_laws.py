import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from randpart import laws
from randpart.laws import (LawKind, LimitLaw, cdf_sigma1, cdf_sigma2, cdf_sigma3_normalized,
                           debye_integral, ks_distance, mult2_partial_sum, pmf_mult1, pmf_mult1_exact,
                           pmf_mult2)


def _quad_debye(t):
    val, _ = quad(lambda u: u / math.expm1(u) if u > 0 else 1.0, 0, t, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def test_exponential_examples():
    assert cdf_sigma1(0) == 0
    assert cdf_sigma1(math.log(2)) == pytest.approx(0.5, abs=1e-15)
    assert cdf_sigma1(1) == pytest.approx(0.6321205588285577, abs=1e-15)
    assert cdf_sigma1(-3) == 0


def test_debye_examples():
    assert cdf_sigma2(0) == 0
    assert abs(cdf_sigma2(50) - 1) <= 1e-12
    # adaptive quadrature oracle value: 0.4726661389
    assert cdf_sigma2(1) == pytest.approx(6 / math.pi**2 * _quad_debye(1.0), abs=1e-13)
    assert round(cdf_sigma2(1), 10) == 0.4726661389
    assert cdf_sigma2(math.inf) == 1


def test_debye_matches_quadrature():
    ts = np.concatenate([np.linspace(0.01, 20, 400), [0.999999, 1.0, 1.000001]])
    ours = debye_integral(ts)
    for t, v in zip(ts, ours):
        assert abs(v - _quad_debye(t)) <= 1e-10


def test_debye_regimes_overlap():
    # both expansions are valid near the switch point
    t = np.linspace(0.8, 2.0, 50)
    series = laws._debye_series(t)
    tail = laws.ZETA2 - laws._debye_tail(t)
    assert np.max(np.abs(series - tail)) <= 1e-12


def test_debye_monotone_fine_grid():
    vals = cdf_sigma2(np.linspace(0, 60, 10**4))
    assert np.all(np.diff(vals) >= 0)


def test_uniform_examples():
    assert cdf_sigma3_normalized(0.3) == 0.3
    assert cdf_sigma3_normalized(-1) == 0
    assert cdf_sigma3_normalized(2) == 1


@given(st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6))
def test_cdfs_in_unit_interval(t):
    for f in (cdf_sigma1, cdf_sigma2, cdf_sigma3_normalized):
        assert 0 <= f(t) <= 1


def test_pmf_examples():
    assert pmf_mult1(1) == 0.5
    assert pmf_mult2(1) == pytest.approx(18 / (4 * math.pi**2))
    with pytest.raises(ValueError):
        pmf_mult1(0)
    with pytest.raises(ValueError):
        pmf_mult2(1.5)


@given(st.integers(1, 2000))
def test_mult1_partial_sums_exact(M):
    from fractions import Fraction
    assert sum(pmf_mult1_exact(m) for m in range(1, M + 1)) == 1 - Fraction(1, M + 1)


def test_mult2_sums_to_one():
    M = 10**6
    direct = math.fsum(pmf_mult2(m) for m in range(1, 2001))
    assert direct == pytest.approx(mult2_partial_sum(2000), abs=1e-13)
    # tail sum_{m > M} pmf <= (6/pi^2) * 2/M
    tail_bound = 12 / (math.pi**2 * M)
    assert abs(mult2_partial_sum(M) - 1) <= tail_bound + 1e-12
    assert abs(mult2_partial_sum(10**7) - 1) <= 1e-6


def test_law_objects():
    law = LimitLaw(LawKind.SIGMA3, n=10**4)
    assert law.normalize([100])[0] == pytest.approx(1.0)
    assert LimitLaw(LawKind.SIGMA1, n=6).normalize([1])[0] == pytest.approx(math.pi / 6)
    assert LimitLaw(LawKind.MULT2).discrete
    with pytest.raises(TypeError):
        LimitLaw(LawKind.MULT1).cdf(0.5)
    with pytest.raises(TypeError):
        LimitLaw(LawKind.SIGMA2).pmf(1)
    with pytest.raises(ValueError):
        LimitLaw(LawKind.SIGMA1).normalize([3])


def test_ks_examples():
    q = np.arange(1, 1001) / 1001
    sample = -np.log1p(-q)
    assert ks_distance(sample, cdf_sigma1) <= 1 / 1000
    assert ks_distance(np.zeros(20), cdf_sigma1) == 1
    grid = (np.arange(10) + 0.5) / 10
    assert ks_distance(grid, cdf_sigma3_normalized) == pytest.approx(0.05)


def test_ks_weights_and_support():
    x = np.array([0.1, 0.1, 0.1, 0.7])
    assert ks_distance(x, cdf_sigma3_normalized) == ks_distance([0.1, 0.7], cdf_sigma3_normalized, weights=[3, 1])
    # all mass outside the window: only endpoints count
    assert ks_distance([0.0, 1.0], cdf_sigma3_normalized, support=(0.05, 0.95)) == pytest.approx(0.45)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=50))
def test_ks_matches_scipy(sample):
    from scipy.stats import kstest
    ref = kstest(sample, "uniform").statistic
    assert ks_distance(sample, cdf_sigma3_normalized) == pytest.approx(ref, abs=1e-12)
