"""Bidder value distributions on ``[0, upper]``.

Two families are supported: uniform laws on ``[0, upper]`` and Beta laws on
``[0, 1]``. Every distribution exposes ``cdf``, ``pdf`` and ``quantile``, all
of which accept floats or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._numerics import SIMPSON_TOL, adaptive_simpson
from .errors import InputError

DEFAULT_GRID = 10_001
CHECK_TOL = 1e-9
_CELL_NODES = 8

_CF_MAX_ITER = 500
_CF_EPS = 1e-16
_CF_TINY = 1e-300


class ValueDistribution:
    """Base class. Subclasses define the support and the three maps."""

    lower = 0.0
    upper = 1.0

    def cdf(self, v):
        raise NotImplementedError

    def pdf(self, v):
        raise NotImplementedError

    def quantile(self, u):
        raise NotImplementedError

    def eval(self, v):
        return eval_dist(self, v)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(ValueDistribution):
    """Uniform law on ``[0, upper]``; ``upper=1`` is the unit uniform."""

    upper: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.upper) and self.upper >= 1.0):
            raise InputError(f"uniform upper bound must be >= 1, got {self.upper!r}")

    def cdf(self, v):
        return np.clip(np.asarray(v, dtype=float) / self.upper, 0.0, 1.0)[()]

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        inside = (v >= 0.0) & (v <= self.upper)
        return np.where(inside, 1.0 / self.upper, 0.0)[()]

    def quantile(self, u):
        return (np.asarray(u, dtype=float) * self.upper)[()]

    def to_dict(self):
        return {"family": "uniform", "upper": self.upper}


@dataclass(frozen=True)
class Beta(ValueDistribution):
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0.0):
                raise InputError(f"Beta {name} must be positive, got {val!r}")

    @property
    def _log_norm(self):
        return math.lgamma(self.alpha + self.beta) - math.lgamma(self.alpha) - math.lgamma(self.beta)

    def cdf(self, v):
        v = np.asarray(v, dtype=float)
        if v.ndim == 0:
            return regularized_incomplete_beta(self.alpha, self.beta, float(v))
        return _betainc_array(self.alpha, self.beta, v)

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        a, b = self.alpha, self.beta
        with np.errstate(divide="ignore", invalid="ignore"):
            logp = (a - 1.0) * np.log(v) + (b - 1.0) * np.log1p(-v) + self._log_norm
            out = np.exp(logp)
        # endpoints: density is 0, finite, or infinite depending on the shape
        out = np.where((v == 0.0) & (a == 1.0), math.exp(self._log_norm), out)
        out = np.where((v == 1.0) & (b == 1.0), math.exp(self._log_norm), out)
        out = np.where((v == 0.0) & (a > 1.0), 0.0, out)
        out = np.where((v == 1.0) & (b > 1.0), 0.0, out)
        out = np.where((v < 0.0) | (v > 1.0), 0.0, out)
        return out[()]

    def quantile(self, u):
        return special.betaincinv(self.alpha, self.beta, np.clip(np.asarray(u, dtype=float), 0.0, 1.0))[()]

    def to_dict(self):
        return {"family": "beta", "alpha": self.alpha, "beta": self.beta}


def from_dict(data: dict) -> ValueDistribution:
    """Build a distribution from ``{"family": "uniform"|"beta", ...}``."""
    if not isinstance(data, dict) or "family" not in data:
        raise InputError(f"distribution description needs a 'family' key: {data!r}")
    family = data["family"]
    if family == "uniform":
        return Uniform(float(data.get("upper", 1.0)))
    if family == "beta":
        try:
            return Beta(float(data["alpha"]), float(data["beta"]))
        except KeyError as exc:
            raise InputError(f"Beta description is missing {exc.args[0]!r}") from None
    raise InputError(f"unknown distribution family {family!r}")


def _betacf(a, b, x):
    # modified Lentz evaluation of the incomplete-beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) by continued fraction, using the symmetry for large ``x``."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _betacf_array(a, b, x):
    qab, qap, qam = a + b, a + 1.0, a - 1.0

    def guard(z):
        return np.where(np.abs(z) < _CF_TINY, _CF_TINY, z)

    c = np.ones_like(x)
    d = 1.0 / guard(1.0 - qab * x / qap)
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 / guard(1.0 + aa * d)
        c = guard(1.0 + aa / c)
        h = np.where(done, h, h * d * c)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 / guard(1.0 + aa * d)
        c = guard(1.0 + aa / c)
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < _CF_EPS
        if done.all():
            break
    return h


def _betainc_array(a, b, x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    low = x <= 0.0
    high = x >= 1.0
    inner = ~(low | high)
    out[low] = 0.0
    out[high] = 1.0
    xi = x[inner]
    if xi.size:
        log_front = (
            math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
            + a * np.log(xi) + b * np.log1p(-xi)
        )
        front = np.exp(log_front)
        direct = xi < (a + 1.0) / (a + b + 2.0)
        res = np.empty_like(xi)
        if direct.any():
            res[direct] = front[direct] * _betacf_array(a, b, xi[direct]) / a
        if (~direct).any():
            res[~direct] = 1.0 - front[~direct] * _betacf_array(b, a, 1.0 - xi[~direct]) / b
        out[inner] = res
    return out


def eval_dist(dist: ValueDistribution, v) -> tuple[float, float]:
    """Return ``(F(v), f(v))``; CDF clamps outside the support, PDF is 0."""
    v = float(v)
    if not math.isfinite(v):
        raise InputError(f"value must be finite, got {v!r}")
    return float(dist.cdf(v)), float(dist.pdf(v))


def sample(dist: ValueDistribution, stream) -> float:
    """Draw one value by inverse transform of ``stream.random()``."""
    return float(dist.quantile(stream.random()))


@dataclass(frozen=True)
class RegularityReport:
    holds: bool
    first_violation: float | None = None


def check_regularity(dist: ValueDistribution, grid_points: int = DEFAULT_GRID) -> RegularityReport:
    """Check that ``F/f`` is nondecreasing on an interior grid of the support."""
    if grid_points < 2:
        raise InputError("grid_points must be >= 2")
    grid = np.linspace(dist.lower, dist.upper, grid_points + 2)[1:-1]
    dens = np.asarray(dist.pdf(grid), dtype=float)
    zero = np.flatnonzero(~(dens > 0.0))
    if zero.size:
        return RegularityReport(False, float(grid[zero[0]]))
    ratio = np.asarray(dist.cdf(grid), dtype=float) / dens
    drops = np.flatnonzero(np.diff(ratio) < -CHECK_TOL)
    if drops.size:
        return RegularityReport(False, float(grid[drops[0] + 1]))
    return RegularityReport(True, None)


def integral_F_pow(dist: ValueDistribution, k: int, a: float, b: float, tol: float = SIMPSON_TOL) -> float:
    """``∫_a^b F(θ)^k dθ`` by adaptive Simpson."""
    if k < 1:
        raise InputError(f"power must be >= 1, got {k}")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InputError("integration limits must be finite")
    if a > b:
        raise InputError(f"lower limit {a!r} exceeds upper limit {b!r}")
    cdf = dist.cdf
    if isinstance(dist, Beta):
        alpha, beta = dist.alpha, dist.beta

        def integrand(x):
            return regularized_incomplete_beta(alpha, beta, x) ** k
    else:
        def integrand(x):
            return float(cdf(x)) ** k

    return adaptive_simpson(integrand, a, b, tol=tol)


@dataclass(frozen=True)
class Assumption1Report:
    holds: bool
    max_ratio: float
    first_violation: float | None = None


def check_assumption1(dist: ValueDistribution, n: int, grid_points: int = DEFAULT_GRID) -> Assumption1Report:
    """Check ``∫_0^v F^{n-1} <= v/n`` on a grid over ``(0, 1]``.

    The running integral is accumulated cell by cell with a fixed
    Gauss-Legendre rule, so the sweep is one vectorised CDF evaluation.
    """
    if n < 2:
        raise InputError(f"n must be >= 2, got {n}")
    if grid_points < 2:
        raise InputError("grid_points must be >= 2")
    if dist.lower != 0.0 or dist.upper != 1.0:
        raise InputError("the tip-bound check needs support [0, 1]")
    grid = np.linspace(0.0, 1.0, grid_points)
    x, w = np.polynomial.legendre.leggauss(_CELL_NODES)
    half = 0.5 * np.diff(grid)
    nodes = grid[:-1, None] + half[:, None] * (x[None, :] + 1.0)
    vals = np.asarray(dist.cdf(nodes.ravel()), dtype=float).reshape(nodes.shape) ** (n - 1)
    running = np.cumsum(half * (vals @ w))
    v = grid[1:]
    ratio = n * running / v
    bad = np.flatnonzero(running > v / n + CHECK_TOL)
    first = float(v[bad[0]]) if bad.size else None
    return Assumption1Report(bad.size == 0, float(ratio.max()), first)
