"""Acceptance gate: one test per criterion, one summary line each.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
printed in the "acceptance criteria" section at the end of the run.
"""

import math
import time

import numpy as np
import pytest

from censorship_auctions.board import (
    ConcurrentProposers,
    Conditional,
    Flat,
    SequentialBlocks,
    SingleBlock,
    censorship_resistance,
)
from censorship_auctions.cli import render_csv
from censorship_auctions.distributions import Uniform
from censorship_auctions.equilibrium import (
    bounds_report,
    solve_auction,
    solve_general_n,
    solve_two_bidder,
    solve_uniform_n,
    threshold_residual,
)
from censorship_auctions.game import AuctionConfig, bribe_decision
from censorship_auctions.montecarlo import baseline_spa, simulate, two_bidder_reference
from censorship_auctions.multiproposer import (
    ConditionalTip,
    MultiProposerConfig,
    briber_payoff,
    optimal_bribe,
    proposer_indifference,
    simulate_multiproposer,
)
from censorship_auctions.verification import perturbed, verify_bidder0_subsets, verify_honest_br

MILLION = 1_000_000


def close(est, target, tol):
    return abs(est - target) <= tol


@pytest.fixture(scope="module")
def quarter_reserve_run():
    r = 0.25
    return simulate(AuctionConfig(1, r), solve_two_bidder(Uniform(), r), MILLION, 2)


def test_01_two_bidder_outcomes(record):
    start = time.perf_counter()
    rep = simulate(AuctionConfig(1), solve_two_bidder(Uniform()), MILLION, 1)
    elapsed = time.perf_counter() - start
    oracle = two_bidder_reference(0.0)["oracle"]["surplus_bidder0"]
    b0 = rep["surplus_bidder0"].mean
    checks = {
        "b0 win": close(rep["win_prob_bidder0"].mean, 0.75, 0.005),
        "b1 win": close(rep["win_prob_honest"].mean, 0.25, 0.005),
        "b1 surplus": close(rep["surplus_honest"].mean, 1 / 12, 0.003),
        "seller": rep["seller_revenue"].mean == 0.0,
        "proposer": close(rep["proposer_revenue"].mean, 0.25, 0.003),
        "b0 surplus vs oracle": close(b0, oracle, 0.003),
        "time": elapsed < 30,
    }
    ok = all(checks.values())
    record("01", "two-bidder outcomes, r=0", ok,
           f"b0 surplus MC={b0:.5f} oracle={oracle:.5f} stated 13/48={13 / 48:.5f}; {elapsed:.1f}s; "
           + ", ".join(k for k, v in checks.items() if not v))
    assert ok, checks


def test_02a_reserve_revenues(record, quarter_reserve_run):
    rep, r = quarter_reserve_run, 0.25
    seller, proposer = rep["seller_revenue"].mean, rep["proposer_revenue"].mean
    ok = close(seller, r * (1 - r**2), 0.003) and close(proposer, 0.25 * (1 - 2 * r) ** 2, 0.003)
    record("02a", "reserve 1/4: seller and proposer revenue", ok, f"seller={seller:.5f} proposer={proposer:.5f}")
    assert ok


def test_02b_reserve_win_probabilities(record, quarter_reserve_run):
    # stated targets; the integrated strategies give 0.6875 and 0.25 instead
    rep, r = quarter_reserve_run, 0.25
    p0, p1 = rep["win_prob_bidder0"].mean, rep["win_prob_honest"].mean
    t0, t1 = (1 - r) * (1 - (0.5 - r) ** 2), (1 - 2 * r) * (r / 2 + 0.25)
    oracle = two_bidder_reference(r)["oracle"]
    ok = close(p0, t0, 0.005) and close(p1, t1, 0.005)
    record("02b", "reserve 1/4: win probabilities", ok,
           f"b0 MC={p0:.5f} target={t0:.6f} oracle={oracle['win_prob_bidder0']:.6f}; "
           f"b1 MC={p1:.5f} target={t1:.6f} oracle={oracle['win_prob_honest']:.6f}")
    assert close(p0, t0, 0.005), (p0, t0)
    assert close(p1, t1, 0.005), (p1, t1)


def test_03_baseline_second_price(record):
    rep = baseline_spa(2, Uniform(), 0.0, MILLION, 3)
    rev, sur = rep["seller_revenue"].mean, rep["surplus_per_bidder"].mean
    ok = close(rev, 1 / 3, 0.003) and close(sur, 1 / 6, 0.003)
    record("03", "plain second-price baseline", ok, f"revenue={rev:.5f} surplus={sur:.5f}")
    assert ok


def test_04_uniform_threshold_solver(record):
    grid = np.linspace(0.0, 1.0, 10_001)
    worst_resid, worst_excess = 0.0, -math.inf
    for n in range(2, 201):
        sol = solve_uniform_n(n)
        worst_resid = max(worst_resid, abs(threshold_residual(sol.v_lo, n)))
        worst_excess = max(worst_excess, float(np.max(sol.tip(grid) - grid / n)))
    ok = worst_resid <= 1e-10 and worst_excess <= 0.0
    record("04", "threshold residual and tip bound, n=2..200", ok,
           f"max residual={worst_resid:.2e} max t(v)-v/n={worst_excess:.2e}")
    assert ok


def test_05a_band_lower_bound(record):
    rep = bounds_report(2, 200)
    ok = rep.lower_holds_from is not None
    record("05a", "1/n <= v_lo^n from some n onward", ok, f"holds from n={rep.lower_holds_from} through 200")
    assert ok


def test_05b_band_upper_bound(record):
    rep = bounds_report(2, 200)
    failing = [row.n for row in rep.rows if not row.upper_holds]
    ok = not failing
    detail = "holds for all n" if ok else (
        f"fails for n={failing[0]}..{failing[-1]} ({len(failing)} values); "
        f"v_lo^n at 200={rep.rows[-1].vlo_pow_n:.4f} vs 1/sqrt(200)={rep.rows[-1].inv_sqrt_n:.4f}")
    record("05b", "v_lo^n <= 1/sqrt(n) for n=2..200", ok, detail)
    assert ok, detail


def test_06_general_solver_matches_closed_form(record):
    grid = np.linspace(0.0, 1.0, 1001)
    gaps = {n: float(np.max(np.abs(solve_general_n(Uniform(), n).tip(grid) - solve_uniform_n(n).tip(grid))))
            for n in (2, 5, 10)}
    ok = max(gaps.values()) <= 1e-8
    record("06", "integral solver == closed form (uniform)", ok, f"sup gaps {gaps}")
    assert ok


def test_07_total_tip_decreasing(record):
    totals = [solve_uniform_n(n).expected_total_tip for n in range(2, 51)]
    decreasing = all(a > b for a, b in zip(totals, totals[1:]))
    zs = {}
    for n in (2, 5, 10):
        sol = solve_uniform_n(n)
        est = simulate(AuctionConfig(n), sol, MILLION, 100 + n)["total_tip"]
        zs[n] = (est.mean - sol.expected_total_tip) / est.std_error
    ok = decreasing and all(abs(z) <= 4 for z in zs.values())
    record("07", "total tip decreasing; MC matches closed form", ok,
           "z-scores " + ", ".join(f"n={n}:{z:+.2f}" for n, z in zs.items()))
    assert ok


def test_08_full_buyout_optimal(record):
    rng = np.random.default_rng(8)
    failures, worst = 0, -math.inf
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        values = rng.random(n)
        tips = rng.random(n) * values / n
        v0 = float(tips.sum() + rng.random() * (1 - tips.sum()))
        rep = verify_bidder0_subsets(tips, v0, values)
        worst = max(worst, rep.max_gain)
        failures += not rep.passed
    ok = failures == 0
    record("08", "full buy-out optimal over all subsets", ok, f"1000 instances, failures={failures}, worst gain={worst:.2e}")
    assert ok


def test_09_honest_best_responses(record):
    gains = {
        1: verify_honest_br(solve_two_bidder(Uniform()), 201, 2001).max_gain,
        2: verify_honest_br(solve_uniform_n(2), 201, 2001).max_gain,
        3: verify_honest_br(solve_uniform_n(3), 101, 1001).max_gain,
    }
    power = {
        1: verify_honest_br(perturbed(solve_two_bidder(Uniform()), 0.05), 201, 2001).max_gain,
        2: verify_honest_br(perturbed(solve_uniform_n(2), 0.05), 101, 1001).max_gain,
    }
    ok = gains[1] <= 1e-6 and gains[2] <= 1e-3 and gains[3] <= 1e-3 and all(g > 1e-3 for g in power.values())
    record("09", "honest tipping is a best response; verifier has power", ok,
           "gains " + ", ".join(f"n={n}:{g:.1e}" for n, g in gains.items())
           + "; perturbed " + ", ".join(f"n={n}:{g:.1e}" for n, g in power.items()))
    assert ok


def test_10_sequential_blocks(record):
    n, grid = 10, np.linspace(0.0, 1.0, 10_001)
    base = solve_uniform_n(n)
    same, freq = True, {}
    for m in (1, 2, 5):
        F0 = Uniform(m + 1.0)
        sol = solve_auction(n, Uniform(), F0)
        same = same and np.array_equal(sol.tip(grid), base.tip(grid))
        board = SequentialBlocks(m) if m > 1 else SingleBlock()
        freq[m] = simulate(AuctionConfig(n, 0.0, Uniform(), F0, board), sol, 100_000, 10)["censor_frequency"]
    ordered = all(
        freq[a].mean - 3 * freq[a].std_error > freq[b].mean + 3 * freq[b].std_error
        for a, b in ((1, 2), (2, 5))
    )
    ok = same and ordered
    record("10", "sequential blocks: same schedule, less censorship", ok,
           f"schedule identical={same}; " + ", ".join(f"m={m}:{e.mean:.4f}+/-{e.std_error:.4f}" for m, e in freq.items()))
    assert ok


def test_11_concurrent_proposers(record):
    rep = simulate_multiproposer(MultiProposerConfig(2), MILLION, 11)
    sim_ok = (
        rep["censor_frequency"].mean == 0.0
        and close(rep["seller_revenue"].mean, 1 / 3, 0.005)
        and close(rep["surplus_bidder0"].mean, 1 / 6, 0.005)
        and close(rep["surplus_honest"].mean, 1 / 6, 0.005)
    )
    worst_indiff, worst_endpoint = 0.0, -math.inf
    for m in (2, 3, 5):
        for tip in (ConditionalTip(0.0, 1.0), ConditionalTip(0.1, 0.6)):
            z = np.linspace(tip.t, tip.T, 1002)[1:-1]
            worst_indiff = max(worst_indiff, float(np.max(np.abs(proposer_indifference(z, tip, m)))))
            zg = np.linspace(tip.t, tip.T, 10_000)
            for C in (0.0, 0.5, 1.0, m * tip.T - 1e-6, m * tip.T, 3.0, 10.0):
                best = float(np.max(briber_payoff(C, zg, tip, m)))
                worst_endpoint = max(worst_endpoint, best - briber_payoff(C, optimal_bribe(C, tip, m), tip, m))
    ok = sim_ok and worst_indiff <= 1e-10 and worst_endpoint <= 1e-9
    record("11", "concurrent proposers: no censorship, indifference, endpoint bribe", ok,
           f"censor={rep['censor_frequency'].mean} revenue={rep['seller_revenue'].mean:.5f} "
           f"surplus0={rep['surplus_bidder0'].mean:.5f} surplus1={rep['surplus_honest'].mean:.5f} "
           f"indiff={worst_indiff:.1e} endpoint gap={worst_endpoint:.1e}")
    assert ok


def test_12_resistance_identities(record):
    rng = np.random.default_rng(12)
    ok = True
    for _ in range(100):
        t = float(rng.random())
        T = t + float(rng.random())
        m, k = int(rng.integers(1, 50)), int(rng.integers(2, 50))
        ok &= censorship_resistance(SingleBlock(), Flat(t)) == t
        ok &= censorship_resistance(SequentialBlocks(m), Flat(t)) == m * t
        ok &= censorship_resistance(ConcurrentProposers(k), Conditional(t, T)) == k * T
    record("12", "resistance identities exact", ok, "100 random inputs per board")
    assert ok


def test_13_determinism(record):
    cfg, sol = AuctionConfig(3), solve_uniform_n(3)
    runs = [
        render_csv(["name", "estimate", "std_error"], simulate(cfg, sol, 300_000, 13, workers=w).rows())
        for w in (1, 1, 4)
    ]
    ok = runs[0] == runs[1] == runs[2]
    record("13", "simulate CSV byte-identical across repeats and workers", ok, f"{len(runs[0])} bytes")
    assert ok


def test_bribe_rule_consistency():
    # the simulated bribe rule is the enumerated optimum whenever it bribes
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(1, 6))
        values = rng.random(n)
        tips = rng.random(n) * values / n
        v0 = float(rng.random())
        if bribe_decision(v0, tips).bribe:
            assert verify_bidder0_subsets(tips, v0, values).passed


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
