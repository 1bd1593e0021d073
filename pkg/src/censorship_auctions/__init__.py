"""Tipping, bribery and censorship in sealed-bid auctions run on a blockchain."""

from .board import (
    BoardSpec,
    Conditional,
    ConcurrentProposers,
    Flat,
    SequentialBlocks,
    SingleBlock,
    censorship_resistance,
)
from .distributions import Beta, Uniform, ValueDistribution, check_assumption1, check_regularity, integral_F_pow
from .equilibrium import (
    EquilibriumSolution,
    bounds_report,
    expected_total_tip,
    solve_auction,
    solve_general_n,
    solve_two_bidder,
    solve_uniform_n,
    solve_uniform_n_reserve,
)
from .errors import AssumptionViolation, InputError, SolverError
from .game import AuctionConfig, bribe_decision, play_batch, play_game, proposer_decision, settle_auction
from .montecarlo import SimulationReport, baseline_spa, figure_data, simulate, two_bidder_reference
from .multiproposer import (
    ConditionalTip,
    MultiProposerConfig,
    briber_payoff,
    censor_prob,
    net_censor_value,
    optimal_bribe,
    simulate_multiproposer,
)
from .verification import DeviationReport, perturbed, utility_honest, verify_bidder0_subsets, verify_honest_br

__version__ = "0.1.0"
