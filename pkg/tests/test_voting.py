import math

import numpy as np
import pytest

from npce import (
    Actor,
    ExplicitList,
    Grid1D,
    TableUtility,
    VotingRule,
    condorcet_classify,
    group_vote,
    individual_vote,
    luce_vote_probability,
    median_voter_position,
    social_utility,
)
from npce.model import CapacityError, DomainError
from tests.conftest import random_table_scenario

S2 = ExplicitList(("a", "b"))


def actor(c, ua, ub, id="x"):
    return Actor(id, c, utility=TableUtility((ua, ub)))


class TestRules:
    def test_binary_sign_rule(self):
        assert individual_vote(VotingRule.BINARY, actor(2.0, 0.7, 0.3), 0, 1, S2) == 2.0
        assert individual_vote(VotingRule.BINARY, actor(2.0, 0.3, 0.7), 0, 1, S2) == -2.0
        assert individual_vote(VotingRule.BINARY, actor(2.0, 0.5, 0.5), 0, 1, S2) == 0.0

    def test_binary_near_tie_is_abstention(self):
        a = actor(5.0, 0.5, 0.5 + 1e-13)
        assert individual_vote(VotingRule.BINARY, a, 0, 1, S2) == 0.0

    def test_proportional(self):
        v = individual_vote(VotingRule.PROPORTIONAL, actor(2.0, 0.7, 0.3), 0, 1, S2)
        assert math.isclose(v, 0.8)

    def test_cubic(self):
        v = individual_vote(VotingRule.CUBIC, actor(2.0, 0.7, 0.3), 0, 1, S2)
        assert math.isclose(v, 0.128)

    def test_antisymmetry_exact(self, rng):
        for _ in range(50):
            a = actor(float(rng.uniform(0, 3)), float(rng.random()), float(rng.random()))
            for rule in VotingRule:
                assert (individual_vote(rule, a, 0, 1, S2)
                        + individual_vote(rule, a, 1, 0, S2)) == 0.0

    def test_vote_bounded_by_capability(self, rng):
        for _ in range(50):
            c = float(rng.uniform(0, 3))
            a = actor(c, float(rng.random()), float(rng.random()))
            for rule in VotingRule:
                assert abs(individual_vote(rule, a, 0, 1, S2)) <= c + 1e-15


class TestGroupAndSocial:
    def test_group_vote_sums(self):
        actors = (actor(2.0, 0.7, 0.3, "p"), actor(1.0, 0.2, 0.5, "q"))
        assert math.isclose(group_vote(VotingRule.PROPORTIONAL, actors, 0, 1, S2), 0.5)

    def test_same_option_is_zero(self):
        actors = (actor(2.0, 0.7, 0.3, "p"),)
        for rule in VotingRule:
            assert group_vote(rule, actors, 0, 0, S2) == 0.0

    def test_social_utility(self):
        assert social_utility((actor(3.0, 0.5, 0.1),), 0, S2) == 1.5

    def test_cpt_identity(self, rng):
        for _ in range(20):
            s = random_table_scenario(rng)
            n = s.issue_set.option_count
            a, b = rng.integers(0, n, size=2)
            gv = group_vote(VotingRule.PROPORTIONAL, s.actors, int(a), int(b), s.issue_set)
            dw = (social_utility(s.actors, int(a), s.issue_set)
                  - social_utility(s.actors, int(b), s.issue_set))
            assert abs(gv - dw) < 1e-12

    def test_luce_probability(self):
        assert math.isclose(luce_vote_probability(actor(1.0, 0.4, 0.4), 0, 1, S2), 0.5)
        assert luce_vote_probability(actor(1.0, 1.0, 0.0), 0, 1, S2) == 1.0

    def test_luce_expected_vote_matches_proportional(self, rng):
        for _ in range(50):
            a = actor(float(rng.uniform(0, 3)), float(rng.random()), float(rng.random()))
            p = luce_vote_probability(a, 0, 1, S2)
            expected = a.capability * (2 * p - 1)
            direct = individual_vote(VotingRule.PROPORTIONAL, a, 0, 1, S2)
            assert abs(expected - direct) < 1e-12


class TestClassification:
    CYCLE = (
        Actor("1", 1.0, position=0, utility=TableUtility((1.0, 0.5, 0.0))),
        Actor("2", 1.0, position=1, utility=TableUtility((0.0, 1.0, 0.5))),
        Actor("3", 1.0, position=2, utility=TableUtility((0.5, 0.0, 1.0))),
    )

    def test_strong_winner(self):
        s = ExplicitList(("a", "b", "c"))
        actors = (
            Actor("1", 2.0, utility=TableUtility((1.0, 0.2, 0.0))),
            Actor("2", 1.0, utility=TableUtility((0.5, 1.0, 0.0))),
        )
        c = condorcet_classify(VotingRule.PROPORTIONAL, actors, range(3), s)
        assert c.kind == "strong"
        assert c.winner == 0

    def test_cycle_has_no_winner(self):
        s = ExplicitList(("a", "b", "c"))
        c = condorcet_classify(VotingRule.BINARY, self.CYCLE, range(3), s)
        assert c.kind == "none"
        assert c.winners == ()

    def test_cycle_hand_vote(self):
        # each contest in the 3-cycle is won 2:1 under the binary rule
        s = ExplicitList(("a", "b", "c"))
        assert group_vote(VotingRule.BINARY, self.CYCLE, 0, 1, s) == 1.0
        assert group_vote(VotingRule.BINARY, self.CYCLE, 1, 2, s) == 1.0
        assert group_vote(VotingRule.BINARY, self.CYCLE, 2, 0, s) == 1.0

    def test_weak_winner(self):
        s = ExplicitList(("a", "b", "c"))
        actors = (
            Actor("1", 1.0, utility=TableUtility((1.0, 1.0, 0.0))),
        )
        c = condorcet_classify(VotingRule.PROPORTIONAL, actors, range(3), s)
        assert c.kind == "weak"
        assert set(c.winners) == {0, 1}

    def test_margins_reported(self):
        s = ExplicitList(("a", "b"))
        actors = (actor(2.0, 1.0, 0.0, "p"),)
        c = condorcet_classify(VotingRule.PROPORTIONAL, actors, range(2), s)
        assert c.margins == (2.0, -2.0)

    def test_capacity_bound(self):
        s = ExplicitList(("a", "b"))
        with pytest.raises(CapacityError):
            condorcet_classify(VotingRule.BINARY, (actor(1.0, 1.0, 0.0),), range(2), s, bound=1)

    def test_omega_argmax_is_strong_winner(self, rng):
        for _ in range(20):
            s = random_table_scenario(rng, n_options=4)
            omega = [social_utility(s.actors, o, s.issue_set) for o in range(4)]
            best = int(np.argmax(omega))
            if sorted(omega)[-1] - sorted(omega)[-2] < 1e-9:
                continue
            c = condorcet_classify(VotingRule.PROPORTIONAL, s.actors, range(4), s.issue_set)
            assert c.kind == "strong" and c.winner == best


class TestMedianVoter:
    GRID = Grid1D(0.0, 1.0, 3)

    def place(self, caps, positions):
        return [Actor(f"a{i}", c, position=p, utility=TableUtility((1.0, 0.5, 0.0)))
                for i, (c, p) in enumerate(zip(caps, positions))]

    def test_middle_of_three(self):
        assert median_voter_position(self.place((1, 1, 1), (0, 1, 2)), self.GRID) == 1

    def test_dominant_mass(self):
        assert median_voter_position(self.place((10, 1, 1), (0, 1, 2)), self.GRID) == 0

    def test_tie_breaks_low(self):
        assert median_voter_position(self.place((1, 1), (0, 2)), self.GRID) == 0

    def test_empty_and_zero_total(self):
        with pytest.raises(DomainError):
            median_voter_position([], self.GRID)
        with pytest.raises(DomainError):
            median_voter_position(self.place((0, 0), (0, 2)), self.GRID)
