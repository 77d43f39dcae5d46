"""Jump-length law: normalization brackets, pmf/tail identities, and
exactness of the two-stage sampler."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from levysearch.powerlaw import (DomainError, integral_tail_bracket, make_law,
                                 mass_bracket, sharp_tail_bracket, zeta_bracket)
from levysearch.search import make_rng

# Frozen via the bracket oracle (partial sums + integral-test brackets):
# c_2 = 3/pi^2 and c_3 = 1/(2 zeta(3)).
C_ALPHA_2 = 0.3039635509
C_ALPHA_3 = 0.4159536863


def test_c_alpha_values():
    assert make_law(2.0).c_alpha == pytest.approx(C_ALPHA_2, abs=1e-9)
    assert make_law(2.0).c_alpha == pytest.approx(3 / np.pi ** 2, abs=1e-12)
    assert make_law(3.0).c_alpha == pytest.approx(C_ALPHA_3, abs=1e-9)


def test_pmf_basics():
    law = make_law(2.5)
    assert law.pmf(0) == 0.5
    law2 = make_law(2.0)
    assert law2.pmf(1) == pytest.approx(C_ALPHA_2, abs=1e-9)
    # normalization cancels in the ratio (4/2)**alpha
    assert law2.pmf(2) / law2.pmf(4) == pytest.approx(4.0, abs=1e-12)


def test_pmf_cap():
    law = make_law(2.5, cap=4)
    assert law.pmf(9) == 0.0
    base = make_law(2.5)
    mass = sum(base.pmf(i) for i in range(5))
    for i in range(5):
        assert law.pmf(i) == pytest.approx(base.pmf(i) / mass, abs=1e-12)


def test_domain_errors():
    with pytest.raises(DomainError):
        make_law(1.0)
    with pytest.raises(DomainError):
        make_law(2.5, cap=0)


def test_bracket_orderings():
    for alpha in (1.05, 1.5, 2.1, 3.0, 4.0):
        for start in (1, 2, 10, 1000):
            lo, hi = integral_tail_bracket(alpha, start)
            slo, shi = sharp_tail_bracket(alpha, start)
            assert lo <= slo <= shi <= hi


def test_normalization_bracket_width():
    for alpha in (2.1, 2.5, 3.0, 4.0):
        lo, hi = mass_bracket(alpha)
        assert lo <= 1.0 <= hi
        assert hi - lo < 1e-9


def test_zeta_against_known():
    lo, hi = zeta_bracket(2.0)
    assert lo <= np.pi ** 2 / 6 <= hi
    lo, hi = zeta_bracket(4.0)
    assert lo <= np.pi ** 4 / 90 <= hi


def test_tail_identities():
    for alpha in (1.5, 2.5, 4.0):
        law = make_law(alpha)
        assert law.tail(1) == 0.5
        lo, hi = law.tail_bracket(100)
        assert 0 < lo <= hi and hi - lo < 1e-12
    law = make_law(2.0, cap=8)
    assert law.tail(9) == 0.0


def test_tail_theta_scaling():
    # direct-summation oracle: tail(i) * i^(alpha-1) stays within a
    # factor-2 band over i in [10, 1e4] for alpha = 2.5
    law = make_law(2.5)
    horizon = 2 * 10 ** 6
    powers = np.arange(1, horizon, dtype=np.float64) ** -2.5
    suffix_total = float(powers.sum())
    prefix = np.cumsum(powers)
    rem_lo, rem_hi = integral_tail_bracket(2.5, horizon)
    remainder = 0.5 * (rem_lo + rem_hi)
    scaled = []
    for i in (10, 100, 1000, 10 ** 4):
        brute = law.c_alpha * (suffix_total - prefix[i - 2] + remainder)
        assert law.tail(i) == pytest.approx(brute, rel=1e-6)
        scaled.append(law.tail(i) * i ** 1.5)
    assert max(scaled) / min(scaled) <= 2.0


def test_capped_is_conditional():
    base = make_law(2.2)
    law = make_law(2.2, cap=6)
    mass = 0.5 + base.c_alpha * sum(i ** -2.2 for i in range(1, 7))
    for i in range(7):
        assert law.pmf(i) == pytest.approx(base.pmf(i) / mass, abs=1e-12)
    assert abs(sum(law.pmf(i) for i in range(7)) - 1.0) < 1e-12


@given(alpha=st.floats(1.02, 6.0), i=st.integers(1, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_pmf_strictly_decreasing(alpha, i):
    law = make_law(alpha)
    assert law.pmf(i) > law.pmf(i + 1) > 0.0


@given(alpha=st.floats(1.05, 5.0), i=st.integers(1, 10 ** 5))
@settings(max_examples=40, deadline=None)
def test_tail_decreasing_and_consistent(alpha, i):
    law = make_law(alpha)
    t1, t2 = law.tail(i), law.tail(i + 1)
    assert t1 > t2 >= 0.0
    assert t1 - t2 == pytest.approx(law.pmf(i), abs=1e-11)


def test_sampler_zero_frequency():
    law = make_law(2.5)
    rng = make_rng(101)
    draws = law.sample(rng, 10 ** 6)
    assert abs((draws == 0).mean() - 0.5) < 0.002


@pytest.mark.parametrize("alpha,horizon", [(2.5, 4096), (2.5, 8), (1.5, 16), (3.5, 4096)])
def test_sampler_chi_square(alpha, horizon):
    # small horizons force the analytic tail-inversion path
    law = make_law(alpha, table_horizon=horizon)
    rng = make_rng(7, horizon)
    draws = law.sample(rng, 10 ** 6)
    edges = list(range(0, 34)) + [np.iinfo(np.int64).max]
    observed = np.histogram(draws, bins=edges)[0]
    expected = np.array([law.pmf(i) for i in range(33)] + [law.tail(33)]) * 10 ** 6
    assert stats.chisquare(observed, expected).pvalue > 0.001


def test_sampler_respects_cap():
    law = make_law(2.5, cap=5)
    rng = make_rng(55)
    draws = law.sample(rng, 10 ** 6)
    assert draws.max() <= 5
    law_big_cap = make_law(2.5, cap=10000, table_horizon=64)
    draws = law_big_cap.sample(rng, 10 ** 5)
    assert draws.max() <= 10000


def test_sampler_deterministic():
    law = make_law(2.3)
    a = law.sample(make_rng(9), 1000)
    b = law.sample(make_rng(9), 1000)
    assert (a == b).all()


def test_scalar_sample():
    law = make_law(2.5)
    rng = make_rng(3)
    value = law.sample(rng)
    assert isinstance(value, int) and value >= 0


def test_cdf_table_monotone():
    law = make_law(2.1)
    assert (np.diff(law.cdf_table) > 0).all()
    assert law.tail(law.table_horizon + 1) > 0
    law5 = make_law(5.0)
    assert (np.diff(law5.cdf_table) >= 0).all()
