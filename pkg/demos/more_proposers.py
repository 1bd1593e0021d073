"""Spreading the auction over more proposers.

Sequential blocks: the briber must pay every block's proposer, so the same
tips buy more protection. Concurrent proposers with a twin tip (0, 1): a
briber would need all of them, and censoring never pays.
"""

import numpy as np

from censorship_auctions import (
    AuctionConfig,
    ConditionalTip,
    MultiProposerConfig,
    SequentialBlocks,
    SingleBlock,
    Uniform,
    briber_payoff,
    censor_prob,
    simulate,
    simulate_multiproposer,
    solve_auction,
)

n = 10
for m in (1, 2, 5):
    F0 = Uniform(m + 1.0)
    sol = solve_auction(n, Uniform(), F0)
    board = SequentialBlocks(m) if m > 1 else SingleBlock()
    rep = simulate(AuctionConfig(n, 0.0, Uniform(), F0, board), sol, 100_000, seed=10)
    est = rep["censor_frequency"]
    print(f"m={m}: censored {est.mean:.4f} +/- {est.std_error:.4f}")

tip = ConditionalTip(0.0, 1.0)
print("\nmixed censoring probability with 3 proposers:")
for z in np.linspace(0, 1, 6):
    print(f"  z={z:.1f}  p={censor_prob(z, tip, 3):.3f}  payoff at C=2: {briber_payoff(2.0, z, tip, 3):+.3f}")

rep = simulate_multiproposer(MultiProposerConfig(2), 500_000, seed=11)
for name in ("censor_frequency", "seller_revenue", "surplus_bidder0", "surplus_honest", "tips_paid"):
    print(f"{name:<18}{rep[name].mean:.5f}")
