import math
import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from packseq import stats as stats_mod
from packseq.stats import (
    Contingency2x2,
    _fisher_tail_grid,
    boschloo_one_sided,
    cohens_h,
    effect_band,
    fisher_one_sided,
    linreg,
    normal_cdf,
    normal_quantile,
    power_two_prop,
)


def fisher_rational(s1: int, f1: int, s2: int, f2: int) -> Fraction:
    """Independent exact-rational hypergeometric upper tail."""
    n1, n2 = s1 + f1, s2 + f2
    m, total = s1 + s2, s1 + f1 + s2 + f2
    denom = comb(total, m)
    return sum(
        (Fraction(comb(n1, a) * comb(n2, m - a), denom) for a in range(s1, min(n1, m) + 1)),
        Fraction(0),
    )


# ---------------------------------------------------------------------------
# Fisher
# ---------------------------------------------------------------------------

def test_fisher_study_table_matches_rational_value():
    # 569/26970, confirmed by exact-rational enumeration
    res = fisher_one_sided(Contingency2x2(15, 2, 8, 8))
    assert res.method == "fisher"
    assert abs(res.p_value - float(Fraction(569, 26970))) < 1e-14
    assert abs(res.p_value - 0.021097515758249908) < 1e-12


def test_fisher_single_observation_each():
    # two margin-respecting tables, equally likely
    assert fisher_one_sided(Contingency2x2(1, 0, 0, 1)).p_value == pytest.approx(0.5)


def test_fisher_zero_successes_is_one():
    assert fisher_one_sided(Contingency2x2(0, 3, 0, 5)).p_value == 1.0


@given(
    n1=st.integers(1, 15),
    n2=st.integers(1, 15),
    data=st.data(),
)
def test_fisher_monotone_in_s1_with_margins_fixed(n1, n2, data):
    m = data.draw(st.integers(0, n1 + n2))
    lo, hi = max(0, m - n2), min(n1, m)
    ps = [
        fisher_one_sided(Contingency2x2(a, n1 - a, m - a, n2 - (m - a))).p_value
        for a in range(lo, hi + 1)
    ]
    for earlier, later in zip(ps, ps[1:]):
        assert later <= earlier + 1e-12


def test_fisher_tail_grid_matches_scalar_route():
    for n1, n2 in [(3, 4), (7, 5), (12, 12)]:
        grid = _fisher_tail_grid(n1, n2)
        for a in range(n1 + 1):
            for b in range(n2 + 1):
                scalar = fisher_one_sided(Contingency2x2(a, n1 - a, b, n2 - b)).p_value
                assert grid[a, b] == pytest.approx(scalar, abs=1e-13)


# ---------------------------------------------------------------------------
# Boschloo
# ---------------------------------------------------------------------------

def test_boschloo_study_table():
    res = boschloo_one_sided(Contingency2x2(15, 2, 8, 8), grid_size=2000)
    assert res.method == "boschloo"
    # statistic is the observed Fisher p
    assert res.statistic == pytest.approx(float(Fraction(569, 26970)), abs=1e-13)
    assert res.p_value == pytest.approx(0.00985865, abs=1e-6)


def test_boschloo_grid_is_converged_at_default():
    coarse = boschloo_one_sided(Contingency2x2(15, 2, 8, 8), grid_size=500).p_value
    fine = boschloo_one_sided(Contingency2x2(15, 2, 8, 8), grid_size=4000).p_value
    assert fine == pytest.approx(coarse, abs=1e-6)


def test_boschloo_degenerate_equal_zero_proportions():
    assert boschloo_one_sided(Contingency2x2(0, 4, 0, 6)).p_value == pytest.approx(1.0)


def test_boschloo_grid_size_guard():
    with pytest.raises(ValueError):
        boschloo_one_sided(Contingency2x2(3, 1, 1, 3), grid_size=9)


@settings(max_examples=60, deadline=None)
@given(
    s1=st.integers(0, 10),
    f1=st.integers(0, 10),
    s2=st.integers(0, 10),
    f2=st.integers(0, 10),
)
def test_boschloo_never_exceeds_fisher(s1, f1, s2, f2):
    if s1 + f1 == 0 or s2 + f2 == 0:
        return
    table = Contingency2x2(s1, f1, s2, f2)
    pb = boschloo_one_sided(table, grid_size=300).p_value
    pf = fisher_one_sided(table).p_value
    assert pb <= pf + 1e-12


# ---------------------------------------------------------------------------
# Cohen's h and power
# ---------------------------------------------------------------------------

def test_cohens_h_study_value():
    # exact closed form for (15/17, 1/2); cross-checked against an
    # independent implementation of the arcsine transform
    assert cohens_h(15 / 17, 8 / 16) == pytest.approx(0.8705847712606054, abs=1e-12)


def test_cohens_h_extremes():
    assert cohens_h(1.0, 0.0) == pytest.approx(math.pi)
    assert cohens_h(0.0, 1.0) == pytest.approx(-math.pi)


@given(p=st.floats(0, 1, allow_nan=False))
def test_cohens_h_identity(p):
    assert cohens_h(p, p) == 0.0


@given(a=st.floats(0, 1, allow_nan=False), b=st.floats(0, 1, allow_nan=False))
def test_cohens_h_antisymmetry(a, b):
    assert cohens_h(a, b) == pytest.approx(-cohens_h(b, a), abs=1e-12)


def test_cohens_h_range_check():
    with pytest.raises(ValueError):
        cohens_h(1.2, 0.5)
    with pytest.raises(ValueError):
        cohens_h(0.5, -0.1)


def test_effect_band():
    assert effect_band(0.1) == "negligible"
    assert effect_band(0.3) == "small"
    assert effect_band(-0.6) == "medium"
    assert effect_band(0.87) == "large"


def test_power_null_effect_equals_alpha():
    for alpha in (0.01, 0.05, 0.2):
        assert power_two_prop(0.0, 20, 20, alpha=alpha) == pytest.approx(alpha, abs=1e-10)


def test_power_study_value():
    assert power_two_prop(0.863, 17, 16, alpha=0.05, one_tailed=True) == pytest.approx(
        0.7975175083121264, abs=1e-9
    )


def test_power_monotone_in_n_and_h():
    base = power_two_prop(0.5, 10, 12)
    for n1 in range(11, 40, 7):
        nxt = power_two_prop(0.5, n1, 12)
        assert nxt > base
        base = nxt
    hs = [0.1, 0.3, 0.5, 0.8, 1.2]
    powers = [power_two_prop(h, 15, 15) for h in hs]
    assert powers == sorted(powers)
    assert len(set(powers)) == len(powers)


def test_power_two_tailed_lower_than_one_tailed():
    one = power_two_prop(0.5, 20, 20, one_tailed=True)
    two = power_two_prop(0.5, 20, 20, one_tailed=False)
    assert two < one


def test_power_argument_validation():
    with pytest.raises(ValueError):
        power_two_prop(0.5, 1, 10)
    with pytest.raises(ValueError):
        power_two_prop(0.5, 10, 10, alpha=0.0)


# ---------------------------------------------------------------------------
# Normal CDF / quantile
# ---------------------------------------------------------------------------

def test_normal_cdf_basics():
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(10.0) == pytest.approx(1.0)
    assert normal_cdf(-10.0) == pytest.approx(0.0, abs=1e-20)


def test_normal_quantile_known_points():
    assert normal_quantile(0.95) == pytest.approx(1.6448536269514722, abs=1e-12)
    assert normal_quantile(0.975) == pytest.approx(1.959963984540054, abs=1e-12)
    assert normal_quantile(0.5) == pytest.approx(0.0, abs=1e-14)


def test_normal_quantile_round_trip():
    for p in [1e-10, 1e-6, 0.01, 0.24, 0.5, 0.77, 0.99, 1 - 1e-6, 1 - 1e-10]:
        assert normal_cdf(normal_quantile(p)) == pytest.approx(p, rel=1e-10, abs=1e-12)


def test_normal_quantile_domain():
    with pytest.raises(ValueError):
        normal_quantile(0.0)
    with pytest.raises(ValueError):
        normal_quantile(1.0)


# ---------------------------------------------------------------------------
# Validation and linreg
# ---------------------------------------------------------------------------

def test_contingency_validation():
    with pytest.raises(ValueError):
        Contingency2x2(-1, 2, 3, 4)
    with pytest.raises(ValueError):
        Contingency2x2(0, 0, 3, 4)
    t = Contingency2x2(15, 2, 8, 8)
    assert (t.n1, t.n2) == (17, 16)
    assert t.p1 == pytest.approx(15 / 17)


def test_test_result_validation():
    with pytest.raises(ValueError):
        stats_mod.TestResult(p_value=1.5, statistic=0.0, method="fisher")


def test_linreg_exact_line():
    xs = [0.0, 1.0, 2.0, 3.5]
    ys = [2 * x + 1 for x in xs]
    fit = linreg(xs, ys)
    assert fit.slope == pytest.approx(2.0)
    assert fit.intercept == pytest.approx(1.0)
    assert fit.r == pytest.approx(1.0)


def test_linreg_two_points():
    assert linreg([0, 1], [0, 4]).slope == pytest.approx(4.0)


def test_linreg_against_naive_normal_equations():
    rng = random.Random(5)
    xs = [rng.uniform(0, 10) for _ in range(50)]
    ys = [3.2 * x - 1.4 + rng.gauss(0, 0.7) for x in xs]
    fit = linreg(xs, ys)
    n = len(xs)
    sx, sy = sum(xs), sum(ys)
    sxx = sum(x * x for x in xs)
    sxy = sum(x * y for x, y in zip(xs, ys))
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
    assert fit.slope == pytest.approx(slope, rel=1e-9)
    assert fit.intercept == pytest.approx((sy - slope * sx) / n, rel=1e-9)


def test_linreg_degenerate_inputs():
    with pytest.raises(ValueError):
        linreg([1.0], [2.0])
    with pytest.raises(ValueError):
        linreg([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        linreg([1.0, 2.0], [1.0])
