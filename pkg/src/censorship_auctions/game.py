"""One play of the sealed-bid auction with a bribing bidder.

Bidder 0 sees the honest tips, decides whether to buy out every honest bid,
the proposer(s) accept or reject, and a second-price auction settles among
the bids that made it into the block. ``play_game`` runs a single play;
``play_batch`` is the vectorised equivalent used by the Monte Carlo driver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .board import BoardSpec, ConcurrentProposers, SequentialBlocks, SingleBlock
from .distributions import Uniform, ValueDistribution
from .equilibrium import TIE_TOL, BribeRule, EquilibriumSolution
from .errors import InputError


@dataclass(frozen=True)
class AuctionConfig:
    n: int
    r: float = 0.0
    F: ValueDistribution = Uniform()
    F0: ValueDistribution = Uniform()
    board: BoardSpec = SingleBlock()

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise InputError(f"need at least one honest bidder, got n={self.n!r}")
        if not (0.0 <= self.r < 1.0):
            raise InputError(f"reserve must lie in [0, 1), got {self.r!r}")
        if isinstance(self.board, ConcurrentProposers):
            raise InputError("concurrent proposers are simulated by the multiproposer module")
        if not isinstance(self.board, (SingleBlock, SequentialBlocks)):
            raise InputError(f"unsupported board {self.board!r}")
        m = self.board.multiplier
        if m >= 2 and not self.F0.upper > m:
            raise InputError(f"with {m} blocks bidder 0's value bound must exceed {m}, got {self.F0.upper!r}")


@dataclass(frozen=True)
class BribeDecision:
    bribe: bool
    payment: float


@dataclass(frozen=True)
class GameOutcome:
    values: tuple[float, ...]
    tips: tuple[float, ...]
    bribed: bool
    bribe_paid: float
    included: frozenset[int]
    winner: int | None
    price: float
    surplus: tuple[float, ...]
    seller_revenue: float
    proposer_revenue: float


def bribe_decision(v0: float, tips, multiplier: float = 1.0, reserve: float = 0.0) -> BribeDecision:
    """Buy out every bid iff ``multiplier * sum(tips) + reserve <= v0``.

    Ties go to bribing. The payment covers all ``multiplier`` proposers.
    """
    if any(t < 0 for t in tips):
        raise InputError("tips must be nonnegative")
    rule = BribeRule(multiplier, reserve)
    if rule.bribes(v0, tips):
        return BribeDecision(True, rule.payment(tips))
    return BribeDecision(False, 0.0)


def proposer_decision(tips_of_subset: float, offered_payment: float) -> bool:
    """A proposer drops the subset iff the offer covers its tips."""
    return offered_payment + TIE_TOL >= tips_of_subset


def settle_auction(bids, r: float = 0.0) -> tuple[int | None, float]:
    """Second-price settlement of ``(bidder, bid)`` pairs with reserve ``r``.

    The highest bid wins if it reaches the reserve, paying the larger of the
    reserve and the best other bid. Equal bids go to the lower bidder id.
    """
    bids = list(bids)
    if not bids:
        return None, 0.0
    ranked = sorted(bids, key=lambda item: (-item[1], item[0]))
    winner, top = ranked[0]
    if top < r:
        return None, 0.0
    runner_up = ranked[1][1] if len(ranked) > 1 else 0.0
    return winner, max(r, runner_up)


def _check_match(config: AuctionConfig, sol: EquilibriumSolution):
    if sol.n != config.n:
        raise InputError(f"solution is for {sol.n} honest bidders, config has {config.n}")
    if sol.r != config.r:
        raise InputError(f"solution reserve {sol.r!r} differs from config reserve {config.r!r}")


def play_game(config: AuctionConfig, sol: EquilibriumSolution, values, censorship: bool = True) -> GameOutcome:
    """Play the auction once; ``values[0]`` is bidder 0's value.

    With ``censorship=False`` bidder 0 never bribes and the honest bidders
    run a plain second-price auction among themselves.
    """
    _check_match(config, sol)
    values = tuple(float(v) for v in values)
    if len(values) != config.n + 1:
        raise InputError(f"expected {config.n + 1} values, got {len(values)}")
    v0, honest = values[0], values[1:]
    tips = tuple(float(t) for t in np.atleast_1d(sol.tip(np.asarray(honest))))
    m = config.board.multiplier

    decision = bribe_decision(v0, tips, m, config.r) if censorship else BribeDecision(False, 0.0)
    bribed = decision.bribe and all(
        proposer_decision(math.fsum(tips), decision.payment / m) for _ in range(m)
    )
    bribe_paid = decision.payment if bribed else 0.0

    if bribed:
        included = frozenset({0})
        bids = [(0, v0)]
    else:
        included = frozenset(range(1, config.n + 1))
        bids = [(i, honest[i - 1]) for i in sorted(included)]
    winner, price = settle_auction(bids, config.r)
    if winner is None:
        price = 0.0

    surplus = [0.0] * (config.n + 1)
    surplus[0] = 0.0 - bribe_paid
    for i in included - {0}:
        surplus[i] -= tips[i - 1]
    if winner is not None:
        surplus[winner] += values[winner] - price
    tips_collected = math.fsum(tips[i - 1] for i in included - {0})
    return GameOutcome(
        values=values,
        tips=tips,
        bribed=bribed,
        bribe_paid=bribe_paid,
        included=included,
        winner=winner,
        price=price,
        surplus=tuple(surplus),
        seller_revenue=price if winner is not None else 0.0,
        proposer_revenue=bribe_paid + tips_collected,
    )


@dataclass
class BatchOutcome:
    """Per-trial arrays; ``winner`` is -1 when the good goes unsold."""

    tips: np.ndarray
    bribed: np.ndarray
    bribe_paid: np.ndarray
    winner: np.ndarray
    price: np.ndarray
    surplus: np.ndarray
    seller_revenue: np.ndarray
    proposer_revenue: np.ndarray


def play_batch(config: AuctionConfig, sol: EquilibriumSolution, values: np.ndarray, censorship: bool = True) -> BatchOutcome:
    """Vectorised :func:`play_game` over rows of ``values`` (trials x (n+1))."""
    _check_match(config, sol)
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] != config.n + 1:
        raise InputError(f"values must have shape (trials, {config.n + 1})")
    trials = values.shape[0]
    r = config.r
    m = config.board.multiplier
    v0, honest = values[:, 0], values[:, 1:]
    tips = sol.tip(honest)
    tip_sum = tips.sum(axis=1) if config.n > 1 else tips[:, 0]
    # proposers accept an offer equal to their forgone tips, so the bribe
    # goes through exactly when bidder 0 makes it
    bribed = (m * tip_sum + r <= v0 + TIE_TOL) if censorship else np.zeros(trials, dtype=bool)
    bribe_paid = np.where(bribed, m * tip_sum, 0.0)

    # honest auction: first index of the max breaks ties toward lower ids
    top_idx = np.argmax(honest, axis=1)
    top = honest[np.arange(trials), top_idx]
    if config.n > 1:
        second = np.partition(honest, -2, axis=1)[:, -2]
    else:
        second = np.zeros(trials)
    honest_sale = top >= r
    b0_sale = v0 >= r

    winner = np.where(bribed, np.where(b0_sale, 0, -1), np.where(honest_sale, top_idx + 1, -1))
    price = np.where(
        bribed,
        np.where(b0_sale, r, 0.0),
        np.where(honest_sale, np.maximum(r, second), 0.0),
    )
    sold = winner >= 0

    surplus = np.zeros_like(values)
    surplus[:, 0] = 0.0 - bribe_paid
    surplus[:, 1:] = -np.where(bribed[:, None], 0.0, tips)
    rows = np.flatnonzero(sold)
    surplus[rows, winner[rows]] += values[rows, winner[rows]] - price[rows]
    tips_collected = np.where(bribed, 0.0, tip_sum)
    return BatchOutcome(
        tips=tips,
        bribed=bribed,
        bribe_paid=bribe_paid,
        winner=winner,
        price=price,
        surplus=surplus,
        seller_revenue=np.where(sold, price, 0.0),
        proposer_revenue=bribe_paid + tips_collected,
    )
