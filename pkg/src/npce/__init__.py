"""Probabilistic non-spatial contest model: coalitions, forecasts, strategy."""

from .model import (
    Actor,
    CapacityError,
    Commitment,
    ConfigurationError,
    Distance1D,
    DomainError,
    ExplicitList,
    Grid1D,
    IssueSet,
    MatchingSpace,
    NpceError,
    PiecewisePeaks,
    Scenario,
    SubsetSpace,
    TableUtility,
    UtilitySpec,
    VotingRule,
    state_utility,
    utility_of,
    validate_scenario,
    validate_spatial_embedding,
)
from .voting import (
    condorcet_classify,
    group_vote,
    individual_vote,
    luce_vote_probability,
    median_voter_position,
    social_utility,
)
from .coalitions import (
    CoalitionBreakdown,
    VictoryMatrix,
    abstention_decision,
    bilateral_victory_probability,
    challenge_incentive,
    coalition_breakdown,
    third_party_vote,
    victory_matrix,
    victory_probability,
)
from .markov import (
    MonteCarloResult,
    SolveDiagnostics,
    limiting_distribution,
    monte_carlo_oracle,
    transition_step,
    two_option_closed_form,
)
from .generators import (
    DegenerateGovernmentError,
    DsumGovernmentUtility,
    ParliamentSpec,
    build_matching_scenario,
    build_parliament_scenario,
    dsum_government_utility,
    gen_grid_1d,
    gen_matching_space,
    gen_subset_space,
    government_utility_table,
    matching_utility,
)
from .strategy import (
    LocalSearchResult,
    OptimizeResult,
    RobustnessReport,
    StrategyDimension,
    StrategyVector,
    apply_strategy,
    classify_robustness,
    expected_utility,
    forecast_expected_utility,
    grid_neighbors,
    local_search_cw,
    matching_neighbors,
    optimize_strategy,
    outcome_risk_rms,
    response_gradient,
    subset_neighbors,
)

__version__ = "0.1.0"
