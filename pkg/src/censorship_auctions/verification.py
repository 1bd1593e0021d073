"""Brute-force checks that the computed strategies are best responses.

Honest tipping is checked by evaluating an honest bidder's expected utility
on a grid of deviations while everybody else keeps the computed schedule.
Bidder 0's choice to buy out every bid at once is checked by enumerating all
subsets of bids it could buy out instead.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from ._numerics import gauss_legendre
from .distributions import ValueDistribution
from .equilibrium import TIE_TOL, EquilibriumSolution
from .errors import InputError
from .game import settle_auction

DEFAULT_TOL = 1e-3
FD_STEP = 1e-5
MAX_SUBSET_BIDDERS = 20
MAX_QUADRATURE_DIMS = 3


@dataclass(frozen=True)
class DeviationReport:
    """``max_gain`` is the largest gain over the whole tested grid."""

    max_gain: float
    argmax: Any
    tolerance: float
    passed: bool

    def describe(self) -> str:
        verdict = "ok" if self.passed else "FAIL"
        return f"max_gain={self.max_gain:.3e} at {self.argmax} (tol {self.tolerance:g}) {verdict}"


@dataclass(frozen=True)
class PerturbedSolution(EquilibriumSolution):
    """Another schedule shifted up by a constant; used to test the checker."""

    base: EquilibriumSolution | None = None
    shift: float = 0.0

    kind = "perturbed"

    def _tip(self, v):
        return np.maximum(0.0, np.asarray(self.base.tip(v), dtype=float) + self.shift)


def perturbed(sol: EquilibriumSolution, shift: float = 0.05) -> PerturbedSolution:
    return PerturbedSolution(
        sol.n, sol.r, sol.v_lo, sol.mean_tip + shift, sol.F, sol.F0, sol.bribe_rule, base=sol, shift=shift,
    )


def _ordered_nodes(u_kinks, depth, nodes, upper=1.0):
    """Quadrature nodes on ``upper >= u_1 >= u_2 >= ... >= u_depth >= 0``.

    Each coordinate is split at the kinks below its own upper limit, so the
    integrand is smooth on every panel.
    """
    breaks = np.unique(np.array([0.0, upper] + [k for k in u_kinks if 0.0 < k < upper]))
    u, w = gauss_legendre(breaks, nodes)
    if depth == 1:
        return u[:, None], w
    cols, weights = [], []
    for ui, wi in zip(u, w):
        sub, sw = _ordered_nodes(u_kinks, depth - 1, nodes, ui)
        cols.append(np.column_stack((np.full(len(sw), ui), sub)))
        weights.append(wi * sw)
    return np.concatenate(cols), np.concatenate(weights)


def _rival_nodes(sol: EquilibriumSolution, v: float, n_rivals: int, nodes: int):
    """Quadrature over rival values, split where the integrand kinks.

    Rivals are exchangeable, so only ordered tuples are visited and weighted
    by ``n_rivals!``; this keeps the kink of the highest rival value on panel
    edges. Integration runs in probability space so weights sum to one.
    Returns the sum of rival tips, the highest rival value and the weights.
    """
    F = sol.F
    kinks = [x for x in (sol.r, sol.v_lo, v) if 0.0 < x < F.upper]
    u_kinks = [float(k) for k in np.atleast_1d(F.cdf(np.asarray(kinks, dtype=float)))] if kinks else []
    u, w = _ordered_nodes(u_kinks, n_rivals, nodes)
    vals = np.asarray(F.quantile(u), dtype=float).reshape(u.shape)
    tips = np.asarray(sol.tip(vals), dtype=float).reshape(u.shape)
    return tips.sum(axis=1), vals[:, 0], w * math.factorial(n_rivals)


def utility_honest(v: float, t, sol: EquilibriumSolution, n: int | None = None,
                   F0: ValueDistribution | None = None, multiplier: float | None = None, nodes: int | None = None):
    """Expected utility of an honest bidder with value ``v`` who tips ``t``.

    Rivals tip by ``sol``. Bidder 0 leaves the bids alone only when
    ``v0 < r + m * (rival tips + t)``; then the bidder pays its tip and wins
    when its value beats the reserve and every rival. Vectorised over ``t``.
    """
    n = sol.n if n is None else n
    F0 = sol.F0 if F0 is None else F0
    m = sol.bribe_rule.multiplier if multiplier is None else multiplier
    r = sol.r
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise InputError("tips must be nonnegative")
    if n == 1:
        out = np.asarray(F0.cdf(r + m * t_arr), dtype=float) * (max(0.0, v - r) - t_arr)
        return float(out) if out.ndim == 0 else out
    n_rivals = n - 1
    if n_rivals > MAX_QUADRATURE_DIMS:
        raise InputError(f"nested quadrature is limited to {MAX_QUADRATURE_DIMS + 1} honest bidders, got {n}")
    if nodes is None:
        nodes = (32, 12, 6)[n_rivals - 1]
    tip_sum, top, weight = _rival_nodes(sol, v, n_rivals, nodes)
    gain = np.where((v > top) & (v >= r), v - np.maximum(r, top), 0.0)
    tt = np.atleast_1d(t_arr)
    stay = np.asarray(F0.cdf(r + m * (tip_sum[None, :] + tt[:, None])), dtype=float)
    out = (stay * (gain[None, :] - tt[:, None])) @ weight
    return float(out[0]) if t_arr.ndim == 0 else out.reshape(t_arr.shape)


def foc_residual(sol: EquilibriumSolution, v: float, h: float = FD_STEP, **kwargs) -> float:
    """Central difference of the utility in ``t`` at the schedule's tip."""
    t0 = sol.tip(v)
    lo = max(0.0, t0 - h)
    hi = t0 + h
    u = utility_honest(v, np.array([lo, hi]), sol, **kwargs)
    return float((u[1] - u[0]) / (hi - lo))


def verify_honest_br(sol: EquilibriumSolution, v_grid_size: int = 201, t_grid_size: int = 2001,
                     tolerance: float = DEFAULT_TOL, **kwargs) -> DeviationReport:
    """Largest gain from deviating to any grid tip in ``[0, v]``, over a grid of ``v``."""
    if v_grid_size < 2 or t_grid_size < 2:
        raise InputError("grids need at least two points")
    best, where = -math.inf, None
    for v in np.linspace(0.0, sol.F.upper, v_grid_size):
        v = float(v)
        t_star = sol.tip(v)
        grid = np.linspace(0.0, v, t_grid_size)
        u = utility_honest(v, np.append(grid, t_star), sol, **kwargs)
        k = int(np.argmax(u[:-1]))
        gain = float(u[k] - u[-1])
        if gain > best:
            best, where = gain, (v, float(grid[k]))
    return DeviationReport(best, where, tolerance, best <= tolerance)


def bidder0_payoff(subset, tips, v0: float, values, reserve: float = 0.0) -> float:
    """Bidder 0 buys out ``subset`` (1-based ids) and bids ``v0`` against the rest."""
    cost = math.fsum(tips[i - 1] for i in subset)
    bids = [(0, v0)] + [(i, values[i - 1]) for i in range(1, len(tips) + 1) if i not in subset]
    winner, price = settle_auction(bids, reserve)
    won = v0 - price if winner == 0 else 0.0
    return won - cost


def verify_bidder0_subsets(tips, v0: float, values, reserve: float = 0.0,
                           tolerance: float = TIE_TOL) -> DeviationReport:
    """Enumerate every subset bidder 0 could buy out.

    ``max_gain`` is the best subset's payoff minus the payoff of buying out
    everybody, and ``argmax`` is that subset. ``passed`` means the full
    buy-out is optimal up to ``tolerance``.
    """
    tips = [float(t) for t in tips]
    values = [float(x) for x in values]
    n = len(tips)
    if n > MAX_SUBSET_BIDDERS:
        raise InputError(f"subset enumeration is limited to {MAX_SUBSET_BIDDERS} bidders, got {n}")
    if len(values) != n:
        raise InputError("tips and values must have the same length")
    everyone = frozenset(range(1, n + 1))
    full = bidder0_payoff(everyone, tips, v0, values, reserve)
    best, arg = -math.inf, None
    for size in range(n + 1):
        for combo in itertools.combinations(range(1, n + 1), size):
            pay = bidder0_payoff(frozenset(combo), tips, v0, values, reserve)
            if pay > best:
                best, arg = pay, frozenset(combo)
    gain = best - full
    if gain <= tolerance:
        arg = everyone
    return DeviationReport(gain, arg, tolerance, gain <= tolerance)
