"""Property-based invariants over randomly generated scenarios and matrices."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from npce import (
    Actor,
    ExplicitList,
    Scenario,
    SubsetSpace,
    TableUtility,
    VotingRule,
    individual_vote,
    limiting_distribution,
    state_utility,
    transition_step,
    utility_of,
    victory_matrix,
)
from npce.model import MatchingSpace

unit = st.floats(0.0, 1.0, allow_nan=False)
capability = st.floats(0.0, 10.0, allow_nan=False)
rule = st.sampled_from(list(VotingRule))


@st.composite
def table_scenarios(draw):
    n_options = draw(st.integers(2, 5))
    n_actors = draw(st.integers(2, 5))
    issue_set = ExplicitList(tuple(f"o{i}" for i in range(n_options)))
    actors = []
    for k in range(n_actors):
        values = tuple(draw(st.lists(unit, min_size=n_options, max_size=n_options)))
        cap = draw(st.floats(0.01, 10.0, allow_nan=False))
        actors.append(Actor(f"a{k}", cap, position=k % n_options,
                            utility=TableUtility(values)))
    return Scenario(issue_set, tuple(actors), voting_rule=draw(rule))


@st.composite
def victory_matrices(draw):
    n = draw(st.integers(2, 6))
    cells = draw(st.lists(st.floats(0.01, 0.99, allow_nan=False),
                          min_size=n * n, max_size=n * n))
    P = np.array(cells).reshape(n, n)
    P = np.triu(P, 1)
    P = P + (1.0 - P.T) * (np.tril(np.ones((n, n))) - np.eye(n))
    np.fill_diagonal(P, 0.5)
    return P


@given(table_scenarios())
@settings(max_examples=60, deadline=None)
def test_utilities_stay_in_unit_interval(s):
    for a in s.actors:
        for o in range(s.issue_set.option_count):
            assert 0.0 <= utility_of(a, o, s.issue_set) <= 1.0


@given(table_scenarios(), st.permutations([0, 1]))
@settings(max_examples=30, deadline=None)
def test_state_utility_permutation_invariant(s, order):
    a = s.actors[0]
    positions = [o % s.issue_set.option_count for o in (0, 1, 1, 0)]
    shuffled = [positions[i] for i in order] + positions[2:]
    assert state_utility(a, positions, s.issue_set) == state_utility(
        a, positions[::-1], s.issue_set)
    assert state_utility(a, shuffled, s.issue_set) == state_utility(
        a, positions, s.issue_set)


@given(table_scenarios())
@settings(max_examples=40, deadline=None)
def test_individual_vote_antisymmetric(s):
    a = s.actors[0]
    n = s.issue_set.option_count
    for x in range(n):
        for y in range(n):
            v = individual_vote(s.voting_rule, a, x, y, s.issue_set)
            w = individual_vote(s.voting_rule, a, y, x, s.issue_set)
            assert v + w == 0.0
            assert abs(v) <= a.capability + 1e-15


@given(table_scenarios())
@settings(max_examples=30, deadline=None)
def test_victory_matrix_algebra(s):
    p = victory_matrix(s).probabilities
    assert np.max(np.abs(p + p.T - 1.0)) <= 1e-15
    assert np.all(np.diag(p) == 0.5)
    assert np.all(p >= 0.0) and np.all(p <= 1.0)


@given(victory_matrices())
@settings(max_examples=40, deadline=None)
def test_solver_returns_valid_distribution(P):
    p, diag = limiting_distribution(P)
    assert diag.converged
    assert abs(p.sum() - 1.0) < 1e-9
    assert np.all(p >= 0.0)


@given(victory_matrices(), st.integers(0, 2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_transition_conserves_probability(P, seed):
    rng = np.random.default_rng(seed)
    n = P.shape[0]
    p = rng.random(n)
    p /= p.sum()
    out = transition_step(P, p)
    assert abs(out.sum() - 1.0) < 1e-12
    assert np.all(out >= -1e-15)


@given(st.integers(1, 10), st.booleans())
@settings(max_examples=30, deadline=None)
def test_subset_roundtrip(m, include_empty):
    space = SubsetSpace(m, include_empty)
    for o in range(min(space.option_count, 64)):
        assert space.encode(space.decode(o)) == o


@given(st.integers(1, 5), st.integers(1, 4))
@settings(max_examples=30, deadline=None)
def test_matching_roundtrip(seats, factions):
    if factions ** seats > 4096:
        return
    space = MatchingSpace(seats, factions)
    for o in range(min(space.option_count, 64)):
        assert space.encode(space.decode(o)) == o
