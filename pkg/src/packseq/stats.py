"""Exact and approximate statistics for two-proportion comparisons.

Implements the one-sided Fisher exact test (hypergeometric upper tail in
log space), Boschloo's unconditional exact test (Fisher p as the test
statistic, nuisance proportion maximized on a uniform open grid), Cohen's
arcsine effect size h, a normal-approximation power calculation for two
proportions, and ordinary least squares. The normal CDF and quantile are
self-contained (erfc plus a refined rational approximation), so nothing
here depends on a statistics library; numpy is used only to vectorize the
Boschloo nuisance grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Tables tied on the Fisher statistic belong in Boschloo's rejection set;
# the tolerance only absorbs float noise on exact ties.
_TIE_REL_TOL = 1e-12


@dataclass(frozen=True)
class Contingency2x2:
    """Success/failure counts for two groups; group 1 is the alleged larger one."""

    s1: int
    f1: int
    s2: int
    f2: int

    def __post_init__(self):
        counts = (self.s1, self.f1, self.s2, self.f2)
        if any(c < 0 or c != int(c) for c in counts):
            raise ValueError("counts must be non-negative integers")
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("each group needs at least one observation")

    @property
    def n1(self) -> int:
        return self.s1 + self.f1

    @property
    def n2(self) -> int:
        return self.s2 + self.f2

    @property
    def p1(self) -> float:
        return self.s1 / self.n1

    @property
    def p2(self) -> float:
        return self.s2 / self.n2


@dataclass(frozen=True)
class TestResult:
    p_value: float
    statistic: float
    method: str  # "fisher" or "boschloo"

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p-value out of range: {self.p_value}")


@lru_cache(maxsize=None)
def _log_binom(n: int, k: int) -> float:
    if k < 0 or k > n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_sum_exp(terms) -> float:
    terms = list(terms)
    hi = max(terms)
    if hi == -math.inf:
        return -math.inf
    return hi + math.log(math.fsum(math.exp(t - hi) for t in terms))


def fisher_one_sided(table: Contingency2x2) -> TestResult:
    """Upper-tail hypergeometric probability of >= s1 successes in group 1.

    Margins fixed at the observed table; tests H1: p1 > p2. Computed in log
    space so tiny tails stay finite.
    """
    n1, n2, m = table.n1, table.n2, table.s1 + table.s2
    total = n1 + n2
    hi = min(n1, m)
    log_denom = _log_binom(total, m)
    tail = [
        _log_binom(n1, a) + _log_binom(n2, m - a) - log_denom
        for a in range(table.s1, hi + 1)
    ]
    p = math.exp(_log_sum_exp(tail)) if tail else 0.0
    return TestResult(p_value=min(p, 1.0), statistic=float(table.s1), method="fisher")


def _fisher_tail_grid(n1: int, n2: int) -> np.ndarray:
    """Fisher upper-tail p for every (a, b) table with the given group sizes.

    Grouped by total successes m = a + b; within a group the tail is a
    suffix sum of the hypergeometric pmf.
    """
    grid = np.ones((n1 + 1, n2 + 1))
    for m in range(0, n1 + n2 + 1):
        lo, hi = max(0, m - n2), min(n1, m)
        log_denom = _log_binom(n1 + n2, m)
        logpmf = [
            _log_binom(n1, a) + _log_binom(n2, m - a) - log_denom
            for a in range(lo, hi + 1)
        ]
        # suffix logsumexp, highest a first
        acc = -math.inf
        tails = [0.0] * len(logpmf)
        for i in range(len(logpmf) - 1, -1, -1):
            acc = _log_sum_exp([acc, logpmf[i]])
            tails[i] = min(math.exp(acc), 1.0)
        for a in range(lo, hi + 1):
            grid[a, m - a] = tails[a - lo]
    return grid


def boschloo_one_sided(table: Contingency2x2, grid_size: int = 2000) -> TestResult:
    """Boschloo's unconditional exact test for H1: p1 > p2.

    The test statistic is the observed one-sided Fisher p-value. Under a
    common success proportion pi, both group counts are binomial; the
    p-value is the maximum over a uniform open grid of pi in (0, 1) of the
    probability of drawing a table whose Fisher p is at most the observed
    one. Uniformly at least as powerful as Fisher: p_boschloo <= p_fisher.
    """
    if grid_size < 10:
        raise ValueError("grid_size must be >= 10")
    n1, n2 = table.n1, table.n2
    fisher_obs = fisher_one_sided(table).p_value
    tails = _fisher_tail_grid(n1, n2)
    mask = tails <= fisher_obs * (1.0 + _TIE_REL_TOL)

    pis = np.arange(1, grid_size + 1, dtype=float) / (grid_size + 1)
    log_pi, log_q = np.log(pis), np.log1p(-pis)
    a = np.arange(n1 + 1, dtype=float)
    b = np.arange(n2 + 1, dtype=float)
    log_ca = np.array([_log_binom(n1, int(k)) for k in a])
    log_cb = np.array([_log_binom(n2, int(k)) for k in b])
    pmf_a = np.exp(log_ca + np.outer(log_pi, a) + np.outer(log_q, n1 - a))
    pmf_b = np.exp(log_cb + np.outer(log_pi, b) + np.outer(log_q, n2 - b))
    rejection = np.einsum("ga,ab,gb->g", pmf_a, mask, pmf_b)
    p = float(rejection.max())
    return TestResult(p_value=min(p, 1.0), statistic=fisher_obs, method="boschloo")


def cohens_h(p1: float, p2: float) -> float:
    """Arcsine effect size h = 2*asin(sqrt(p1)) - 2*asin(sqrt(p2)).

    Signed; interpret |h| against the 0.2 / 0.5 / 0.8 small/medium/large
    bands.
    """
    for p in (p1, p2):
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"proportion out of [0,1]: {p}")
    return 2.0 * math.asin(math.sqrt(p1)) - 2.0 * math.asin(math.sqrt(p2))


def effect_band(h: float) -> str:
    mag = abs(h)
    if mag < 0.2:
        return "negligible"
    if mag < 0.5:
        return "small"
    if mag < 0.8:
        return "medium"
    return "large"


def power_two_prop(
    h: float, n1: int, n2: int, alpha: float = 0.05, one_tailed: bool = True
) -> float:
    """Normal-approximation power for a two-proportion test at effect size h.

    Unequal groups enter through the harmonic mean n' = 2*n1*n2/(n1+n2):
    power = Phi(|h| * sqrt(n'/2) - z_{1-alpha}) for a one-tailed test.
    """
    if n1 < 2 or n2 < 2:
        raise ValueError("group sizes must be >= 2")
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must be in (0, 1)")
    n_eff = 2.0 * n1 * n2 / (n1 + n2)
    z_crit = normal_quantile(1.0 - (alpha if one_tailed else alpha / 2.0))
    return normal_cdf(abs(h) * math.sqrt(n_eff / 2.0) - z_crit)


# ---------------------------------------------------------------------------
# Normal CDF / quantile
# ---------------------------------------------------------------------------

def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


# Rational approximation coefficients for the inverse normal CDF
# (P. Acklam's minimax fit), refined below with one Halley step.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF, accurate to well below 1e-10."""
    if not (0.0 < p < 1.0):
        raise ValueError("quantile needs p in (0, 1)")
    p_low, p_high = 0.02425, 1 - 0.02425
    if p < p_low:
        q = math.sqrt(-2 * math.log(p))
        x = ((((( _C[0]*q + _C[1])*q + _C[2])*q + _C[3])*q + _C[4])*q + _C[5]) / \
            (((( _D[0]*q + _D[1])*q + _D[2])*q + _D[3])*q + 1)
    elif p <= p_high:
        q = p - 0.5
        r = q * q
        x = ((((( _A[0]*r + _A[1])*r + _A[2])*r + _A[3])*r + _A[4])*r + _A[5])*q / \
            ((((( _B[0]*r + _B[1])*r + _B[2])*r + _B[3])*r + _B[4])*r + 1)
    else:
        q = math.sqrt(-2 * math.log(1 - p))
        x = -((((( _C[0]*q + _C[1])*q + _C[2])*q + _C[3])*q + _C[4])*q + _C[5]) / \
            (((( _D[0]*q + _D[1])*q + _D[2])*q + _D[3])*q + 1)
    # one Halley refinement step
    err = normal_cdf(x) - p
    u = err * math.sqrt(2 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


# ---------------------------------------------------------------------------
# Least squares
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinregResult:
    slope: float
    intercept: float
    r: float


def linreg(xs, ys) -> LinregResult:
    """Ordinary least squares fit y = slope*x + intercept with Pearson r."""
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise ValueError("xs and ys must have equal length")
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two points")
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    sxx = math.fsum((x - mean_x) ** 2 for x in xs)
    if sxx == 0.0:
        raise ValueError("xs are all equal; slope undefined")
    sxy = math.fsum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    syy = math.fsum((y - mean_y) ** 2 for y in ys)
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    r = 0.0 if syy == 0.0 else sxy / math.sqrt(sxx * syy)
    return LinregResult(slope, intercept, r)
