"""Equilibrium tipping schedules for single- and multi-bidder auctions.

Every solver returns an immutable :class:`EquilibriumSolution`. Its ``tip``
method maps honest values (scalar or array) to tips; ``v_lo`` is the lowest
value that tips a positive amount and ``mean_tip`` is the expected tip of one
honest bidder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import bisect, bisect_array, gauss_legendre
from .distributions import (
    Uniform,
    ValueDistribution,
    check_assumption1,
    check_regularity,
    integral_F_pow,
)
from .errors import AssumptionViolation, InputError, SolverError

GRID_POINTS = 10_001
# payments that match to rounding count as ties, and ties favour bidder 0
TIE_TOL = 1e-12


@dataclass(frozen=True)
class BribeRule:
    """Bidder 0 buys out every honest bid when that is affordable.

    A bribe costs ``multiplier`` times the posted tips (one payment per
    proposer) and the briber then still pays the reserve to win.
    """

    multiplier: float = 1.0
    reserve: float = 0.0

    def __post_init__(self):
        if not self.multiplier > 0:
            raise InputError(f"bribe multiplier must be positive, got {self.multiplier!r}")

    def payment(self, tips) -> float:
        return self.multiplier * math.fsum(tips)

    def bribes(self, v0, tips) -> bool:
        return self.payment(tips) + self.reserve <= v0 + TIE_TOL


@dataclass(frozen=True)
class EquilibriumSolution:
    n: int
    r: float
    v_lo: float
    mean_tip: float
    F: ValueDistribution
    F0: ValueDistribution
    bribe_rule: BribeRule = field(default_factory=BribeRule)

    kind = "abstract"

    def tip(self, v):
        """Equilibrium tip of an honest bidder with value ``v``."""
        arr = np.asarray(v, dtype=float)
        out = np.asarray(self._tip(np.atleast_1d(arr).ravel()), dtype=float).reshape(arr.shape)
        return float(out) if out.ndim == 0 else out

    def _tip(self, v):
        raise NotImplementedError

    @property
    def expected_total_tip(self) -> float:
        return self.n * self.mean_tip


def _expected_value(fn, dist, breaks, nodes=48):
    """``E[fn(V)]`` for ``V ~ dist`` by Gauss-Legendre in probability space."""
    u_breaks = np.concatenate(([0.0], np.asarray(dist.cdf(np.asarray(breaks, dtype=float))).ravel(), [1.0]))
    u_breaks = np.clip(u_breaks, 0.0, 1.0)
    # extra panels keep the kink at each breakpoint cheap to resolve
    u_breaks = np.unique(np.concatenate([np.linspace(a, b, 9) for a, b in zip(u_breaks[:-1], u_breaks[1:])]))
    u, w = gauss_legendre(u_breaks, nodes)
    return float(np.dot(w, fn(dist.quantile(u))))


# -- two bidders -------------------------------------------------------------

@dataclass(frozen=True)
class TwoBidderSolution(EquilibriumSolution):
    kind = "two_bidder"

    def foc(self, v, t):
        """First-order condition ``(v - r - t) f0(r + t) - F0(r + t)``."""
        x = self.r + t
        return (v - self.r - t) * self.F0.pdf(x) - self.F0.cdf(x)

    def _tip(self, v):
        out = np.zeros_like(v)
        active = v > self.v_lo
        if active.any():
            va = v[active]
            hi = va - self.r
            with np.errstate(invalid="ignore"):
                out[active] = bisect_array(lambda t: self.foc(va, t), np.zeros_like(va), hi)
        return out


def solve_two_bidder(F0: ValueDistribution, r: float = 0.0, F: ValueDistribution | None = None) -> TwoBidderSolution:
    """Tipping equilibrium with one honest bidder against a bribing bidder.

    ``F`` is the honest bidder's law; it only enters the mean tip.
    """
    if not (0.0 <= r < 1.0):
        raise InputError(f"reserve must lie in [0, 1), got {r!r}")
    F = Uniform() if F is None else F
    report = check_regularity(F0)
    if not report.holds:
        raise SolverError(
            f"bidder-0 law fails the F0/f0 monotonicity check near v={report.first_violation!r}"
        )
    F0_r, f0_r = float(F0.cdf(r)), float(F0.pdf(r))
    v_lo = r if F0_r == 0.0 else r + F0_r / f0_r
    sol = TwoBidderSolution(1, r, v_lo, 0.0, F, F0, BribeRule(1.0, r))
    mean = _expected_value(sol.tip, F, [min(v_lo, F.upper)])
    return TwoBidderSolution(1, r, v_lo, mean, F, F0, BribeRule(1.0, r))


# -- n honest bidders, uniform values ----------------------------------------

def threshold_residual(v, n: int):
    """Left side of the uniform threshold equation; zero at ``v_lo``."""
    return (n + 1) * v**n / (n * (n - 1)) - v ** (n + 1) / (n + 1) - 1.0 / (n * (n + 1))


@dataclass(frozen=True)
class UniformNSolution(EquilibriumSolution):
    kind = "uniform_n"

    def _tip(self, v):
        n = self.n
        return np.where(v < self.v_lo, 0.0, (v**n - self.v_lo**n) / (2 * n))

    @property
    def expected_total_tip(self):
        return self.v_lo**self.n / (self.n - 1)


def solve_uniform_n(n: int) -> UniformNSolution:
    """Closed-form tipping schedule for ``n >= 2`` uniform honest bidders."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InputError(f"need n >= 2 honest bidders (got {n!r}); use solve_two_bidder for n = 1")
    n = int(n)
    v_lo = bisect(lambda v: threshold_residual(v, n), 0.0, 1.0)
    c = v_lo**n / (n * (n - 1))
    return UniformNSolution(n, 0.0, v_lo, c, Uniform(), Uniform())


def expected_total_tip(sol: EquilibriumSolution, n: int | None = None) -> float:
    """Expected sum of honest tips; ``v_lo**n / (n - 1)`` in the uniform case."""
    if n is not None and n != sol.n:
        raise InputError(f"solution is for n={sol.n}, not n={n}")
    return sol.expected_total_tip


# -- n honest bidders, general values ----------------------------------------

@dataclass(frozen=True)
class GeneralNSolution(EquilibriumSolution):
    kind = "general_n"
    assumption_holds: bool = True

    def _tip(self, v):
        k = self.n - 1
        out = np.zeros_like(v)
        idx = np.flatnonzero(v > self.v_lo)
        if idx.size == 0:
            return out
        # additivity: integrate between consecutive sorted values only
        order = idx[np.argsort(v[idx], kind="stable")]
        points = np.concatenate(([self.v_lo], np.minimum(v[order], self.F.upper)))
        pieces = [integral_F_pow(self.F, k, float(a), float(b)) for a, b in zip(points[:-1], points[1:])]
        out[order] = 0.5 * np.cumsum(pieces)
        return out


def general_threshold_residual(F: ValueDistribution, n: int, x: float, total: float | None = None) -> float:
    """``∫_0^1 F^{n-1} - ∫_x^1 F^n - (n+1)/(n-1) ∫_0^x F^{n-1}``; decreasing in x."""
    if total is None:
        total = integral_F_pow(F, n - 1, 0.0, 1.0)
    return (
        total
        - integral_F_pow(F, n, x, 1.0)
        - (n + 1) / (n - 1) * integral_F_pow(F, n - 1, 0.0, x)
    )


def solve_general_n(F: ValueDistribution, n: int, strict: bool = True, grid_points: int = GRID_POINTS) -> GeneralNSolution:
    """Tipping schedule for ``n >= 2`` honest bidders with value law ``F``.

    With ``strict`` (the default) a law that breaks the tip bound
    ``∫_0^v F^{n-1} <= v/n`` is refused with AssumptionViolation. Passing
    ``strict=False`` solves anyway and records the failure on the result.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InputError(f"need n >= 2 honest bidders (got {n!r}); use solve_two_bidder for n = 1")
    n = int(n)
    if F.lower != 0.0 or F.upper != 1.0:
        raise InputError("honest values must be supported on [0, 1]")
    report = check_assumption1(F, n, grid_points)
    if strict and not report.holds:
        raise AssumptionViolation(
            f"tip bound fails for n={n}: n*S(v)/v reaches {report.max_ratio:.6g}, "
            f"first exceeding 1 at v={report.first_violation!r}",
            report,
        )
    total = integral_F_pow(F, n - 1, 0.0, 1.0)

    def resid(x):
        return general_threshold_residual(F, n, x, total)

    lo_val, hi_val = resid(0.0), resid(1.0)
    if not (lo_val > 0.0 > hi_val):
        raise SolverError(f"threshold condition has no sign change on [0, 1]: {lo_val!r}, {hi_val!r}")
    v_lo = bisect(resid, 0.0, 1.0)
    c = integral_F_pow(F, n - 1, 0.0, v_lo) / (n - 1)
    return GeneralNSolution(n, 0.0, v_lo, c, F, Uniform(), BribeRule(), report.holds)


# -- n honest bidders with a reserve -----------------------------------------

@dataclass(frozen=True)
class UniformNReserveSolution(EquilibriumSolution):
    kind = "uniform_n_reserve"

    @property
    def offset(self):
        """Constant subtracted inside the tip: ``(n-1) c_r + r + r^n / n``."""
        n, r = self.n, self.r
        return (n - 1) * self.mean_tip + r + r**n / n

    def _tip(self, v):
        n = self.n
        return np.where(v < self.v_lo, 0.0, np.maximum(0.0, 0.5 * (v**n / n - self.offset)))


def _reserve_mean_tip(n, r, c):
    """``E[max(0, (v^n/n - K)/2)]`` for uniform ``v`` with ``K = (n-1)c + r + r^n/n``."""
    K = (n - 1) * c + r + r**n / n
    v_lo = min(1.0, (n * K) ** (1.0 / n))
    return 0.5 * ((1.0 - v_lo ** (n + 1)) / (n * (n + 1)) - K * (1.0 - v_lo))


def solve_uniform_n_reserve(n: int, r: float) -> UniformNReserveSolution:
    """Uniform ``n``-bidder schedule when the seller sets reserve ``r``.

    The mean tip solves ``c = E[t_c(v)]``; the no-reserve mean tip brackets it
    from above.
    """
    if not (0.0 <= r < 1.0):
        raise InputError(f"reserve must lie in [0, 1), got {r!r}")
    base = solve_uniform_n(n)
    n = base.n

    def gap(c):
        return _reserve_mean_tip(n, r, c) - c

    hi = base.mean_tip
    if gap(0.0) <= 0.0:
        c = 0.0
    elif gap(hi) >= 0.0:
        c = hi
    else:
        c = bisect(gap, 0.0, hi)
    K = (n - 1) * c + r + r**n / n
    v_lo = min(1.0, (n * K) ** (1.0 / n))
    return UniformNReserveSolution(n, r, v_lo, c, Uniform(), Uniform(), BribeRule(1.0, r))


# -- dispatch -----------------------------------------------------------------

def solve_auction(n: int, F: ValueDistribution, F0: ValueDistribution, r: float = 0.0, strict: bool = True) -> EquilibriumSolution:
    """Pick the solver that matches the auction's primitives.

    One honest bidder goes to the two-bidder solver. Several honest bidders
    with a uniform bidder-0 law use the closed forms when values are uniform
    on [0, 1] and the integral solver otherwise. A uniform bidder-0 law on
    ``[0, kappa]`` rescales bidder 0's utility only, so the schedule is the
    same as for ``kappa = 1``.
    """
    if n == 1:
        return solve_two_bidder(F0, r, F)
    if not isinstance(F0, Uniform):
        raise InputError("several honest bidders are only solvable against a uniform bidder 0")
    if isinstance(F, Uniform) and F.upper == 1.0:
        return solve_uniform_n_reserve(n, r) if r > 0.0 else solve_uniform_n(n)
    if r > 0.0:
        raise InputError("a reserve price is only supported for uniform honest values")
    return solve_general_n(F, n, strict=strict)


# -- asymptotic band for the uniform threshold --------------------------------

@dataclass(frozen=True)
class BoundsRow:
    n: int
    vlo_pow_n: float
    inv_n: float
    inv_sqrt_n: float
    lower_holds: bool
    upper_holds: bool


@dataclass(frozen=True)
class BoundsReport:
    rows: list[BoundsRow]
    lower_holds_from: int | None
    upper_holds_from: int | None
    both_hold_from: int | None


def _holds_from(rows, pred):
    start = None
    for row in reversed(rows):
        if not pred(row):
            break
        start = row.n
    return start


def bounds_report(n_min: int, n_max: int) -> BoundsReport:
    """Compare ``v_lo(n)**n`` with ``1/n`` and ``1/sqrt(n)`` for each ``n``.

    The ``*_holds_from`` fields give the smallest ``n`` from which the bound
    holds at every ``n`` through ``n_max`` (``None`` if it fails at ``n_max``).
    """
    if not (2 <= n_min <= n_max):
        raise InputError(f"need 2 <= n_min <= n_max, got {n_min}, {n_max}")
    rows = []
    for n in range(n_min, n_max + 1):
        x = solve_uniform_n(n).v_lo ** n
        rows.append(BoundsRow(n, x, 1.0 / n, 1.0 / math.sqrt(n), 1.0 / n <= x, x <= 1.0 / math.sqrt(n)))
    return BoundsReport(
        rows,
        _holds_from(rows, lambda r: r.lower_holds),
        _holds_from(rows, lambda r: r.upper_holds),
        _holds_from(rows, lambda r: r.lower_holds and r.upper_holds),
    )
