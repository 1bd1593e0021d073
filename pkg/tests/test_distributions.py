import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special, stats

from censorship_auctions.distributions import (
    Beta,
    Uniform,
    check_assumption1,
    check_regularity,
    eval_dist,
    from_dict,
    integral_F_pow,
    regularized_incomplete_beta,
    sample,
)
from censorship_auctions.errors import InputError

# frozen: mean of Beta(2,2).cdf(U)**3 over 10**7 uniforms (seed 20260101),
# its standard error, and the adaptive-quadrature value of the same integral
MC_BETA22_K3 = 0.30729453802945933
MC_BETA22_K3_SE = 0.00011142621244615947


class FixedStream:
    def __init__(self, u):
        self.u = u

    def random(self):
        return self.u


def test_eval_examples():
    assert eval_dist(Uniform(), 0.5) == (0.5, 1.0)
    F, f = eval_dist(Beta(1, 1), 0.3)
    assert F == pytest.approx(0.3, abs=1e-14) and f == pytest.approx(1.0, abs=1e-14)
    F, f = eval_dist(Beta(2, 2), 0.5)
    assert F == pytest.approx(integrate.quad(lambda x: 6 * x * (1 - x), 0, 0.5)[0], abs=1e-12)
    assert f == pytest.approx(1.5, abs=1e-12)


def test_eval_clamps_and_rejects_nonfinite():
    assert eval_dist(Uniform(), -1.0) == (0.0, 0.0)
    assert eval_dist(Uniform(), 2.0) == (1.0, 0.0)
    assert eval_dist(Beta(2, 3), 1.5) == (1.0, 0.0)
    for bad in (math.nan, math.inf):
        with pytest.raises(InputError):
            eval_dist(Beta(2, 2), bad)


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (0.5, 2), (2, 2), (5, 1), (1, 5), (3.7, 0.8), (30, 40)])
def test_incomplete_beta_matches_scipy(a, b):
    xs = np.linspace(0.0, 1.0, 501)
    ours = Beta(a, b).cdf(xs)
    assert np.max(np.abs(ours - special.betainc(a, b, xs))) <= 1e-12
    for x in (1e-6, 0.13, 0.5, 0.87, 1 - 1e-6):
        assert regularized_incomplete_beta(a, b, x) == pytest.approx(stats.beta(a, b).cdf(x), abs=1e-12)


@pytest.mark.parametrize("a,b", [(0.5, 2), (2, 2), (5, 1), (2, 7)])
def test_pdf_matches_scipy(a, b):
    xs = np.linspace(0.01, 0.99, 99)
    assert np.allclose(Beta(a, b).pdf(xs), stats.beta(a, b).pdf(xs), rtol=1e-12, atol=0)


def test_sample_examples():
    assert sample(Uniform(), FixedStream(0.42)) == 0.42
    assert sample(Uniform(3.0), FixedStream(0.5)) == 1.5
    assert sample(Beta(2, 2), FixedStream(0.5)) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("dist", [Uniform(), Uniform(2.5), Beta(2, 2), Beta(0.5, 2), Beta(5, 1)])
def test_quantile_inverts_cdf(dist):
    v = np.linspace(0.01, 0.99, 197) * dist.upper
    assert np.max(np.abs(dist.quantile(dist.cdf(v)) - v)) <= 1e-9


@given(st.floats(0.2, 20), st.floats(0.2, 20), st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=200, deadline=None)
def test_cdf_monotone(a, b, x, y):
    lo, hi = sorted((x, y))
    d = Beta(a, b)
    assert d.cdf(lo) <= d.cdf(hi) + 1e-15


def test_regularity():
    assert check_regularity(Uniform(), 1000).holds
    assert check_regularity(Beta(2, 2), 1000).holds
    # independent grid oracle for F/f with scipy
    g = np.linspace(0, 1, 1002)[1:-1]
    B = stats.beta(0.5, 2)
    expected = bool(np.all(np.diff(B.cdf(g) / B.pdf(g)) >= -1e-9))
    assert check_regularity(Beta(0.5, 2), 1000).holds is expected
    with pytest.raises(InputError):
        check_regularity(Uniform(), 1)


class Bumpy(Uniform):
    """Density that vanishes on part of the interior."""

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        return np.where((v > 0.4) & (v < 0.6), 0.0, 1.0)[()]


def test_regularity_flags_zero_density():
    report = check_regularity(Bumpy(), 1000)
    assert not report.holds and 0.4 <= report.first_violation <= 0.6


def test_assumption1_examples():
    rep = check_assumption1(Uniform(), 5)
    assert rep.holds and rep.max_ratio <= 1.0 + 1e-12
    rep = check_assumption1(Beta(2, 2), 3)
    # scipy.quad oracle: the ratio peaks at v = 1 with value 1.1142857...
    assert not rep.holds
    assert rep.max_ratio == pytest.approx(1.1142857142857143, abs=1e-6)
    rep = check_assumption1(Beta(5, 1), 2)
    assert rep.holds and rep.max_ratio == pytest.approx(1 / 3, abs=1e-6)


@pytest.mark.parametrize("n", range(2, 101))
def test_assumption1_uniform_all_n(n):
    assert check_assumption1(Uniform(), n, grid_points=2001).holds


def test_assumption1_rejects_other_supports():
    with pytest.raises(InputError):
        check_assumption1(Uniform(2.0), 3)
    with pytest.raises(InputError):
        check_assumption1(Uniform(), 1)


def test_integral_examples():
    assert integral_F_pow(Uniform(), 2, 0, 1) == pytest.approx(1 / 3, abs=1e-10)
    assert integral_F_pow(Uniform(), 1, 0.2, 0.6) == pytest.approx(0.16, abs=1e-10)
    val = integral_F_pow(Beta(2, 2), 3, 0, 1)
    assert abs(val - MC_BETA22_K3) <= 4 * MC_BETA22_K3_SE
    assert val == pytest.approx(integrate.quad(lambda x: stats.beta(2, 2).cdf(x) ** 3, 0, 1, epsabs=1e-14)[0], abs=1e-10)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_integral_additive(x, y, z, k):
    a, b, c = sorted((x, y, z))
    d = Beta(2, 3)
    whole = integral_F_pow(d, k, a, c)
    assert whole == pytest.approx(integral_F_pow(d, k, a, b) + integral_F_pow(d, k, b, c), abs=1e-9)


def test_integral_errors():
    with pytest.raises(InputError):
        integral_F_pow(Uniform(), 1, 0.6, 0.2)
    with pytest.raises(InputError):
        integral_F_pow(Uniform(), 0, 0, 1)


def test_from_dict_and_validation():
    assert from_dict({"family": "uniform"}) == Uniform()
    assert from_dict({"family": "uniform", "upper": 3}) == Uniform(3.0)
    assert from_dict({"family": "beta", "alpha": 2, "beta": 2}) == Beta(2.0, 2.0)
    assert from_dict(Beta(2, 5).to_dict()) == Beta(2, 5)
    for bad in ({}, {"family": "normal"}, {"family": "beta", "alpha": 2}, "uniform"):
        with pytest.raises(InputError):
            from_dict(bad)
    with pytest.raises(InputError):
        Uniform(0.5)
    with pytest.raises(InputError):
        Beta(0, 1)
