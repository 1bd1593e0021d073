import numpy as np
import pytest

from censorship_auctions.board import SequentialBlocks
from censorship_auctions.distributions import Beta, Uniform
from censorship_auctions.equilibrium import solve_auction, solve_two_bidder, solve_uniform_n
from censorship_auctions.errors import InputError
from censorship_auctions.game import AuctionConfig
from censorship_auctions.montecarlo import (
    CHUNK,
    baseline_spa,
    figure_data,
    run_chunked,
    simulate,
    trial_uniforms,
    two_bidder_reference,
)


def test_substreams_do_not_depend_on_chunking():
    whole = trial_uniforms(11, 0, 1000, 5)
    for start in (0, 1, 313, 999):
        part = trial_uniforms(11, start, 1000 - start, 5)
        assert np.array_equal(part, whole[start:])
    assert not np.array_equal(trial_uniforms(12, 0, 10, 5), whole[:10])
    with pytest.raises(InputError):
        trial_uniforms(-1, 0, 1, 1)
    with pytest.raises(InputError):
        trial_uniforms(1 << 64, 0, 1, 1)


def test_report_identical_across_workers():
    cfg, sol = AuctionConfig(2), solve_uniform_n(2)
    trials = 2 * CHUNK + 17
    a = simulate(cfg, sol, trials, 5)
    b = simulate(cfg, sol, trials, 5, workers=4)
    c = simulate(cfg, sol, trials, 5, workers=3)
    assert a.estimates == b.estimates == c.estimates
    assert simulate(cfg, sol, trials, 6).estimates != a.estimates


def test_run_chunked_order():
    out = run_chunked(CHUNK + 5, 1, 1, lambda u: {"u": u[:, 0]}, workers=2)
    assert np.array_equal(out["u"], trial_uniforms(1, 0, CHUNK + 5, 1)[:, 0])
    with pytest.raises(InputError):
        run_chunked(0, 1, 1, lambda u: {"u": u[:, 0]})


def test_two_bidder_small_run():
    rep = simulate(AuctionConfig(1), solve_two_bidder(Uniform()), 200_000, 7)
    assert rep["seller_revenue"].mean == 0.0
    assert rep["win_prob_bidder0"].within(0.75, 4)
    assert rep["surplus_honest"].within(1 / 12, 4)
    for est in rep.estimates.values():
        assert est.std_error >= 0
    for name in ("win_prob_bidder0", "win_prob_honest", "no_sale_prob", "censor_frequency"):
        assert 0 <= rep[name].mean <= 1
    assert set(rep.reference) == {"stated", "oracle"}


def test_references():
    ref = two_bidder_reference(0.0)
    assert ref["stated"]["surplus_bidder0"] == pytest.approx(13 / 48)
    assert ref["oracle"]["surplus_bidder0"] == pytest.approx(7 / 24, abs=1e-9)
    for key in ("win_prob_bidder0", "win_prob_honest", "surplus_honest", "proposer_revenue"):
        assert ref["oracle"][key] == pytest.approx(ref["stated"][key], abs=1e-9)
    ref = two_bidder_reference(0.25)
    assert ref["oracle"]["seller_revenue"] == pytest.approx(0.234375, abs=1e-9)
    assert ref["oracle"]["proposer_revenue"] == pytest.approx(0.0625, abs=1e-9)
    # integrated directly: bidder 0 wins with probability 3/4 - r^2, bidder 1 with 1/4
    assert ref["oracle"]["win_prob_bidder0"] == pytest.approx(0.6875, abs=1e-9)
    assert ref["oracle"]["win_prob_honest"] == pytest.approx(0.25, abs=1e-9)
    with pytest.raises(InputError):
        two_bidder_reference(0.6)


def test_baseline():
    rep = baseline_spa(2, Uniform(), 0.0, 200_000, 3)
    assert rep["seller_revenue"].within(1 / 3, 4)
    assert rep["surplus_per_bidder"].within(1 / 6, 4)
    rep = baseline_spa(1, Uniform(), 0.5, 200_000, 3)
    assert rep["seller_revenue"].within(0.25, 4)
    with pytest.raises(InputError):
        baseline_spa(0, Uniform(), 0.0, 10, 1)


def test_total_tip_matches_solver():
    sol = solve_uniform_n(5)
    rep = simulate(AuctionConfig(5), sol, 200_000, 9)
    assert rep["total_tip"].within(sol.expected_total_tip, 4)


def test_sequential_blocks_multiply_bribe():
    cfg = AuctionConfig(10, board=SequentialBlocks(2), F0=Uniform(3.0))
    sol = solve_auction(10, Uniform(), cfg.F0)
    rep = simulate(cfg, sol, 50_000, 1)
    expected = 1 - 2 * sol.expected_total_tip / 3
    assert rep["censor_frequency"].within(expected, 4)
    assert rep["bribe_paid"].mean > 0


def test_figure_data():
    rows = figure_data(2, 50)
    assert rows[0].total_tip == pytest.approx(0.1204, abs=1e-4)
    assert all(a.total_tip > b.total_tip for a, b in zip(rows, rows[1:]))
    beta = figure_data(2, 6, Beta(1, 1))
    for a, b in zip(beta, rows):
        assert a.total_tip == pytest.approx(b.total_tip, abs=1e-8)
    flagged = figure_data(2, 4, Beta(2, 2))
    assert [row.n for row in flagged if not row.assumption_holds] == [3, 4]
    with pytest.raises(InputError):
        figure_data(1, 3)
