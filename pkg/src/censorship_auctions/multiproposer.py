"""Several proposers building the same slot, with conditional tips.

An honest bid carries a twin tip ``(t, T)``: ``T`` goes to the proposer if it
is the only one to include the bid, ``t`` to each includer otherwise. The
briber offers every proposer ``z`` to leave the honest bids out, and each
proposer censors with the symmetric mixed-strategy probability below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._numerics import gauss_legendre
from .board import Conditional
from .distributions import Uniform, ValueDistribution, integral_F_pow
from .errors import InputError
from .montecarlo import SimulationReport, _report, run_chunked

ConditionalTip = Conditional
# equilibrium twin tip of every honest bidder
HONEST_TIP = Conditional(0.0, 1.0)


@dataclass(frozen=True)
class MultiProposerConfig:
    m: int
    F0: ValueDistribution = Uniform()
    F1: ValueDistribution = Uniform()
    n: int = 1

    def __post_init__(self):
        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < 2:
            raise InputError(f"need m >= 2 proposers, got {self.m!r}")
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise InputError(f"need at least one honest bidder, got n={self.n!r}")


def _check_m(m):
    if m < 2:
        raise InputError(f"need m >= 2 proposers, got {m!r}")


def censor_prob(z, tip: Conditional, m: int):
    """Probability that each proposer drops the bids when offered ``z``."""
    _check_m(m)
    z_arr = np.asarray(z, dtype=float)
    if tip.T > tip.t:
        frac = np.clip((z_arr - tip.t) / (tip.T - tip.t), 0.0, 1.0)
        p = frac ** (1.0 / (m - 1))
    else:
        p = np.zeros_like(z_arr)
    p = np.where(z_arr >= tip.T, 1.0, np.where(z_arr < tip.t, 0.0, p))
    return float(p) if p.ndim == 0 else p


def proposer_indifference(z, tip: Conditional, m: int):
    """``z - t - (T - t) p^(m-1)``: a proposer's marginal gain from censoring
    more often when the others censor with ``p = censor_prob(z)``."""
    p = censor_prob(z, tip, m)
    return np.asarray(z, dtype=float) - tip.t - (tip.T - tip.t) * np.asarray(p) ** (m - 1)


def briber_payoff(C: float, z, tip: Conditional, m: int):
    """``C p^m - m z p``: censoring succeeds only if all ``m`` proposers comply."""
    if C < 0:
        raise InputError(f"censoring value must be nonnegative, got {C!r}")
    p = np.asarray(censor_prob(z, tip, m))
    out = C * p**m - m * np.asarray(z, dtype=float) * p
    return float(out) if out.ndim == 0 else out


def optimal_bribe(C: float, tip: Conditional, m: int) -> float:
    """``T`` if censoring for sure is worth ``m T``, otherwise ``t`` (no bribe)."""
    _check_m(m)
    return float(tip.T if C >= m * tip.T else tip.t)


def net_censor_value(v0: float, F1: ValueDistribution, n: int = 1) -> float:
    """Winning for free minus the second-price surplus against ``n`` rivals."""
    if v0 < 0:
        raise InputError(f"value must be nonnegative, got {v0!r}")
    if v0 == 0:
        return 0.0
    return v0 - integral_F_pow(F1, n, 0.0, float(v0))


def _net_censor_value_array(v0, F1, n, panels=8, nodes=16):
    # vectorised twin of net_censor_value: fixed Gauss-Legendre on [0, v0]
    x, w = gauss_legendre(np.linspace(0.0, 1.0, panels + 1), nodes)
    pts = v0[:, None] * x[None, :]
    vals = np.asarray(F1.cdf(pts.ravel()), dtype=float).reshape(pts.shape) ** n
    return v0 - v0 * (vals @ w)


def simulate_multiproposer(config: MultiProposerConfig, trials: int, seed: int,
                           workers: int | None = None) -> SimulationReport:
    """Play the concurrent-proposer game ``trials`` times.

    Honest bidders post ``(0, 1)``. Bidder 0 values censoring at
    ``C(v0)``, offers ``optimal_bribe`` against the bids' combined twin tip
    and each proposer then censors independently with ``censor_prob``. The
    auction settles on the union of the blocks, bidder 0 always bidding.
    """
    m, n = config.m, config.n
    combined = Conditional(n * HONEST_TIP.t, n * HONEST_TIP.T)

    def kernel(u):
        rows = np.arange(u.shape[0])
        v0 = config.F0.quantile(u[:, 0])
        honest = config.F1.quantile(u[:, 1:n + 1])
        coins = u[:, n + 1:]
        C = _net_censor_value_array(v0, config.F1, n)
        z = np.where(C >= m * combined.T, combined.T, combined.t)
        p = np.asarray(censor_prob(z, combined, m))
        censors = coins < p[:, None]
        includers = m - censors.sum(axis=1)
        censored = includers == 0

        top_idx = np.argmax(honest, axis=1)
        top = honest[rows, top_idx]
        second = np.partition(honest, -2, axis=1)[:, -2] if n > 1 else np.zeros(len(rows))
        # ties go to bidder 0, the lowest id
        b0_wins = censored | (v0 >= top)
        winner = np.where(b0_wins, 0, top_idx + 1)
        price = np.where(censored, 0.0, np.where(b0_wins, top, np.maximum(v0, second)))

        per_bid = np.where(includers == 1, HONEST_TIP.T, np.where(includers > 1, includers * HONEST_TIP.t, 0.0))
        bribe_paid = z * censors.sum(axis=1)
        surplus0 = np.where(b0_wins, v0 - price, 0.0) - bribe_paid
        honest_surplus = -np.repeat(per_bid[:, None], n, axis=1)
        hw = ~b0_wins
        honest_surplus[rows[hw], top_idx[hw]] += top[hw] - price[hw]
        return {
            "censor_frequency": censored,
            "win_prob_bidder0": winner == 0,
            "win_prob_honest": winner >= 1,
            "surplus_bidder0": surplus0,
            "surplus_honest": honest_surplus.mean(axis=1),
            "seller_revenue": price,
            "proposer_revenue": n * per_bid + bribe_paid,
            "tips_paid": n * per_bid,
            "bribe_paid": bribe_paid,
        }

    return _report(trials, seed, run_chunked(trials, seed, 1 + n + m, kernel, workers))
