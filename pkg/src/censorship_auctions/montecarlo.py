"""Seeded Monte Carlo estimates of auction outcomes.

Trial ``i`` reads its uniforms from a Philox counter block that depends only
on ``(seed, i)``, so the estimates do not depend on how trials are chunked
or on how many workers run them. Means are reduced with ``math.fsum`` over
the per-trial values in trial order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox
from scipy import integrate

from .board import SingleBlock
from .distributions import Uniform, ValueDistribution
from .equilibrium import EquilibriumSolution, solve_general_n, solve_uniform_n
from .errors import InputError, SolverError
from .game import AuctionConfig, play_batch

CHUNK = 1 << 16
UINT64_MAX = (1 << 64) - 1


def trial_uniforms(seed: int, start: int, count: int, width: int) -> np.ndarray:
    """Uniforms for trials ``start .. start+count-1``, ``width`` per trial.

    Each trial owns ``ceil(width / 4)`` Philox counter blocks.
    """
    if not (0 <= seed <= UINT64_MAX):
        raise InputError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    blocks = -(-width // 4)
    bitgen = Philox(key=seed)
    bitgen.advance(start * blocks)
    return Generator(bitgen).random((count, 4 * blocks))[:, :width]


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float

    def within(self, target: float, n_se: float) -> bool:
        return abs(self.mean - target) <= n_se * self.std_error


@dataclass
class SimulationReport:
    trials: int
    seed: int
    estimates: dict[str, Estimate]
    reference: dict[str, dict[str, float]] = field(default_factory=dict)

    def __getitem__(self, name) -> Estimate:
        return self.estimates[name]

    def rows(self):
        return [(name, est.mean, est.std_error) for name, est in self.estimates.items()]


def _estimate(x: np.ndarray) -> Estimate:
    n = x.size
    mean = math.fsum(x.tolist()) / n
    if n < 2:
        return Estimate(mean, 0.0)
    var = math.fsum(((x - mean) ** 2).tolist()) / (n - 1)
    return Estimate(mean, math.sqrt(var / n))


def run_chunked(trials: int, seed: int, width: int, kernel, workers: int | None = None) -> dict[str, np.ndarray]:
    """Apply ``kernel(uniforms) -> {metric: per-trial array}`` chunk by chunk.

    Chunks may run on a thread pool; results are stitched back in trial order.
    """
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials!r}")
    starts = list(range(0, trials, CHUNK))

    def job(start):
        count = min(CHUNK, trials - start)
        return kernel(trial_uniforms(seed, start, count, width))

    if workers is None or workers <= 1:
        parts = [job(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, starts))
    return {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}


def _report(trials, seed, metrics, reference=None) -> SimulationReport:
    estimates = {name: _estimate(arr.astype(float)) for name, arr in metrics.items()}
    return SimulationReport(trials, seed, estimates, reference or {})


def simulate(config: AuctionConfig, sol: EquilibriumSolution, trials: int, seed: int, workers: int | None = None) -> SimulationReport:
    """Estimate outcome statistics of the equilibrium over ``trials`` plays.

    The ``surplus_honest`` metric averages over honest bidders, so for one
    honest bidder it is that bidder's surplus. ``total_tip`` is the sum of
    posted honest tips; ``tips_paid`` only counts tips on included bids.
    """
    n = config.n

    def kernel(u):
        values = np.empty_like(u)
        values[:, 0] = config.F0.quantile(u[:, 0])
        values[:, 1:] = config.F.quantile(u[:, 1:])
        out = play_batch(config, sol, values)
        tip_sum = out.tips.sum(axis=1)
        return {
            "win_prob_bidder0": out.winner == 0,
            "win_prob_honest": out.winner >= 1,
            "no_sale_prob": out.winner < 0,
            "censor_frequency": out.bribed,
            "surplus_bidder0": out.surplus[:, 0],
            "surplus_honest": out.surplus[:, 1:].mean(axis=1),
            "seller_revenue": out.seller_revenue,
            "proposer_revenue": out.proposer_revenue,
            "bribe_paid": out.bribe_paid,
            "total_tip": tip_sum,
            "tips_paid": out.proposer_revenue - out.bribe_paid,
        }

    metrics = run_chunked(trials, seed, n + 1, kernel, workers)
    reference = None
    if (
        n == 1
        and isinstance(config.board, SingleBlock)
        and config.F == Uniform()
        and config.F0 == Uniform()
    ):
        reference = two_bidder_reference(config.r)
    return _report(trials, seed, metrics, reference)


def baseline_spa(n_total: int, F: ValueDistribution, r: float, trials: int, seed: int, workers: int | None = None) -> SimulationReport:
    """Plain second-price auction among ``n_total`` bidders, no censorship."""
    if n_total < 1:
        raise InputError(f"need at least one bidder, got {n_total!r}")
    if not (0.0 <= r < F.upper):
        raise InputError(f"reserve {r!r} outside the value support")

    def kernel(u):
        values = F.quantile(u)
        rows = np.arange(values.shape[0])
        top_idx = np.argmax(values, axis=1)
        top = values[rows, top_idx]
        second = np.partition(values, -2, axis=1)[:, -2] if n_total > 1 else np.zeros(len(rows))
        sold = top >= r
        price = np.where(sold, np.maximum(r, second), 0.0)
        surplus = np.zeros_like(values)
        surplus[rows[sold], top_idx[sold]] = top[sold] - price[sold]
        return {
            "sale_prob": sold,
            "seller_revenue": price,
            "surplus_per_bidder": surplus.mean(axis=1),
            "surplus_bidder0": surplus[:, 0],
        }

    return _report(trials, seed, run_chunked(trials, seed, n_total, kernel, workers))


# -- reference values for one honest bidder against bidder 0 ------------------

def two_bidder_reference(r: float = 0.0) -> dict[str, dict[str, float]]:
    """Closed-form claims and double-integral oracle values, uniform laws.

    The oracle integrates the equilibrium strategies directly: the honest tip
    is ``max(0, v1/2 - r)`` and bidder 0 buys the bid out iff
    ``v0 >= tip + r``. Every integrand is smooth inside its limits.
    """
    if not (0.0 <= r <= 0.5):
        raise InputError("reference values are stated for r in [0, 1/2]")

    def tip(v1):
        return max(0.0, 0.5 * v1 - r)

    def cut(v1):
        return min(1.0, tip(v1) + r)

    def dbl(fn, lo0, hi0, lo1=0.0, hi1=1.0):
        # outer variable v1, inner v0
        val, _ = integrate.dblquad(lambda v0, v1: fn(v0, v1), lo1, hi1, lo0, hi0, epsabs=1e-12, epsrel=1e-12)
        return val

    bribe_lo, bribe_hi = cut, (lambda v1: 1.0)
    stay_lo, stay_hi = (lambda v1: 0.0), cut
    b0_win = dbl(lambda v0, v1: 1.0 if v0 >= r else 0.0, bribe_lo, bribe_hi)
    b1_win = dbl(lambda v0, v1: 1.0, stay_lo, stay_hi, lo1=r)
    b0_surplus = dbl(lambda v0, v1: v0 - r - tip(v1), bribe_lo, bribe_hi)
    b1_surplus = dbl(lambda v0, v1: max(0.0, v1 - r) - tip(v1), stay_lo, stay_hi)
    seller = r * (b0_win + b1_win)
    proposer = dbl(lambda v0, v1: tip(v1), lambda v1: 0.0, bribe_hi)
    oracle = {
        "win_prob_bidder0": b0_win,
        "win_prob_honest": b1_win,
        "surplus_bidder0": b0_surplus,
        "surplus_honest": b1_surplus,
        "seller_revenue": seller,
        "proposer_revenue": proposer,
    }
    if r == 0.0:
        stated = {
            "win_prob_bidder0": 3 / 4,
            "win_prob_honest": 1 / 4,
            "surplus_bidder0": 13 / 48,
            "surplus_honest": 1 / 12,
            "seller_revenue": 0.0,
            "proposer_revenue": 1 / 4,
        }
    else:
        stated = {
            "win_prob_bidder0": (1 - r) * (1 - (0.5 - r) ** 2),
            "win_prob_honest": (1 - 2 * r) * (r / 2 + 0.25),
            "seller_revenue": r * (1 - r**2),
            "proposer_revenue": 0.25 * (1 - 2 * r) ** 2,
        }
    return {"stated": stated, "oracle": oracle}


# -- figure data --------------------------------------------------------------

@dataclass(frozen=True)
class FigureRow:
    n: int
    v_lo: float
    total_tip: float
    assumption_holds: bool = True


def figure_data(n_min: int, n_max: int, F: ValueDistribution = Uniform(), grid_points: int = 2001) -> list[FigureRow]:
    """Threshold and expected total tip ``n * E[t]`` for each ``n``.

    Uniform values use the closed form and are cross-checked against the
    quadrature of the schedule. Other laws use the integral solver; a law
    that breaks the tip bound at some ``n`` is still solved but its row has
    ``assumption_holds=False``.
    """
    if not (2 <= n_min <= n_max):
        raise InputError(f"need 2 <= n_min <= n_max, got {n_min}, {n_max}")
    rows = []
    for n in range(n_min, n_max + 1):
        if F == Uniform():
            sol = solve_uniform_n(n)
            total = sol.expected_total_tip
            check = n * integrate.quad(sol.tip, sol.v_lo, 1.0, epsabs=1e-13, epsrel=1e-13)[0]
            if abs(check - total) > 1e-8:
                raise SolverError(f"n={n}: closed-form total tip {total!r} disagrees with quadrature {check!r}")
            rows.append(FigureRow(n, sol.v_lo, total, True))
        else:
            sol = solve_general_n(F, n, strict=False, grid_points=grid_points)
            rows.append(FigureRow(n, sol.v_lo, sol.expected_total_tip, sol.assumption_holds))
    return rows
