"""Issue-set constructors and the two-stage government-formation utility model.

The nested model values each candidate government by solving, per policy
issue, the contest among the in-government parties placed at their ideals,
then scoring the forecast's RMS deviation from the evaluating actor's ideal
and averaging across issues by salience.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coalitions import victory_matrix
from .markov import DEFAULT_MAX_ITERS, DEFAULT_TOLERANCE, limiting_distribution
from .model import (
    Actor,
    Commitment,
    ConfigurationError,
    ExplicitList,
    Grid1D,
    IssueSet,
    MatchingSpace,
    NpceError,
    OptionId,
    Scenario,
    SubsetSpace,
    TableUtility,
    UtilitySpec,
    VotingRule,
)


class DegenerateGovernmentError(NpceError):
    """A candidate government has no capability to decide anything."""


def gen_grid_1d(lo: float, hi: float, steps: int) -> Grid1D:
    return Grid1D(lo, hi, steps)


def gen_subset_space(m: int, include_empty: bool = False) -> SubsetSpace:
    return SubsetSpace(m, include_empty)


def gen_matching_space(seats: int, factions: int) -> MatchingSpace:
    return MatchingSpace(seats, factions)


@dataclass(frozen=True)
class ParliamentSpec:
    """Parties competing for government membership, judged by evaluators.

    Parties need per-issue ideals; evaluators need per-issue ideals and
    saliences.  The two lists may share actors.
    """

    parties: tuple[Actor, ...]
    issues: tuple[Grid1D, ...]
    evaluators: tuple[Actor, ...]
    voting_rule: VotingRule = VotingRule.PROPORTIONAL
    commitment: Commitment = Commitment.UNCOMMITTED
    abstention_enabled: bool = False
    include_empty: bool = False
    tolerance: float = DEFAULT_TOLERANCE
    max_iters: int = DEFAULT_MAX_ITERS
    epsilon_scale: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "parties", tuple(self.parties))
        object.__setattr__(self, "issues", tuple(self.issues))
        object.__setattr__(self, "evaluators", tuple(self.evaluators))
        if not self.parties or not self.issues or not self.evaluators:
            raise ConfigurationError("parliament spec needs parties, issues, and evaluators")
        for p in self.parties:
            if len(p.ideals) != len(self.issues):
                raise ConfigurationError(f"party {p.id!r} needs one ideal per issue")
            self._check_ideals(p)
        for e in self.evaluators:
            if len(e.ideals) != len(self.issues):
                raise ConfigurationError(f"evaluator {e.id!r} needs one ideal per issue")
            self._check_ideals(e)
            if len(e.saliences) != len(self.issues):
                raise ConfigurationError(f"evaluator {e.id!r} needs one salience per issue")
            if any(s < 0 for s in e.saliences):
                raise ConfigurationError(f"evaluator {e.id!r} has a negative salience")
            if sum(e.saliences) <= 0:
                raise ConfigurationError(f"evaluator {e.id!r} has zero total salience")

    def _check_ideals(self, actor: Actor) -> None:
        for grid, ideal in zip(self.issues, actor.ideals):
            if not grid.lo <= ideal <= grid.hi:
                raise ConfigurationError(
                    f"{actor.id!r} ideal {ideal} outside grid [{grid.lo}, {grid.hi}]"
                )

    @property
    def government_space(self) -> SubsetSpace:
        return SubsetSpace(len(self.parties), self.include_empty)


def _issue_forecast(spec: ParliamentSpec, members: tuple[int, ...], issue_idx: int):
    """Distribution over the in-government parties' ideals on one issue."""
    grid = spec.issues[issue_idx]
    coords = [spec.parties[m].ideals[issue_idx] for m in members]
    if len(members) == 1:
        return coords, np.array([1.0])
    span = grid.span
    options = ExplicitList(tuple(f"{c:g}#{k}" for k, c in enumerate(coords)))
    actors = []
    for pos, m in enumerate(members):
        party = spec.parties[m]
        values = tuple(1.0 - abs(c - party.ideals[issue_idx]) / span for c in coords)
        actors.append(
            Actor(party.id, party.capability, position=pos, utility=TableUtility(values))
        )
    sub = Scenario(
        options,
        tuple(actors),
        voting_rule=spec.voting_rule,
        commitment=spec.commitment,
        abstention_enabled=spec.abstention_enabled,
        epsilon_scale=spec.epsilon_scale,
    )
    p, diag = limiting_distribution(
        victory_matrix(sub), tolerance=spec.tolerance, max_iters=spec.max_iters
    )
    if not diag.converged:
        raise NpceError(f"nested solve did not converge on issue {issue_idx}")
    return coords, p


def _government_members(spec: ParliamentSpec, gov: OptionId) -> tuple[int, ...]:
    members = spec.government_space.members(gov)
    if not members:
        raise DegenerateGovernmentError("empty government")
    if sum(spec.parties[m].capability for m in members) <= 0:
        names = [spec.parties[m].id for m in members]
        raise DegenerateGovernmentError(f"government {names} has zero total capability")
    return members


def _score_forecasts(spec: ParliamentSpec, forecasts, actor: Actor) -> float:
    total_sal = sum(actor.saliences)
    score = 0.0
    for s, (coords, p) in enumerate(forecasts):
        span = spec.issues[s].span
        dev = [(actor.ideals[s] - c) ** 2 for c in coords]
        rms = float(np.sqrt(np.dot(p, dev))) / span
        score += actor.saliences[s] * (1.0 - rms)
    return score / total_sal


def government_issue_forecast(spec: ParliamentSpec, gov: OptionId, issue_idx: int):
    """Nested forecast for one government on one issue: (coordinates, distribution)."""
    coords, p = _issue_forecast(spec, _government_members(spec, gov), issue_idx)
    return list(coords), np.asarray(p)


def dsum_government_utility(spec: ParliamentSpec, gov: OptionId, actor: Actor) -> float:
    """Utility of one candidate government to one evaluating actor, in [0, 1]."""
    members = _government_members(spec, gov)
    forecasts = [_issue_forecast(spec, members, s) for s in range(len(spec.issues))]
    return _score_forecasts(spec, forecasts, actor)


@dataclass(frozen=True)
class DsumGovernmentUtility(UtilitySpec):
    """Utility spec backed by nested per-issue solves; expensive but exact."""

    spec: ParliamentSpec
    evaluator_id: str

    def value(self, option: OptionId, issue_set: IssueSet) -> float:
        if not isinstance(issue_set, SubsetSpace):
            raise ConfigurationError("government utility requires a SubsetSpace")
        actor = next(e for e in self.spec.evaluators if e.id == self.evaluator_id)
        return dsum_government_utility(self.spec, option, actor)


def government_utility_table(spec: ParliamentSpec) -> dict[str, tuple[float, ...]]:
    """Per-evaluator utility over every government, nested solves shared."""
    space = spec.government_space
    per_gov_forecasts = []
    for gov in range(space.option_count):
        members = _government_members(spec, gov)
        per_gov_forecasts.append([_issue_forecast(spec, members, s) for s in range(len(spec.issues))])
    return {
        e.id: tuple(_score_forecasts(spec, forecasts, e) for forecasts in per_gov_forecasts)
        for e in spec.evaluators
    }


def build_parliament_scenario(spec: ParliamentSpec) -> Scenario:
    """First-stage scenario over governments; evaluators positioned at their argmax."""
    space = spec.government_space
    table = government_utility_table(spec)
    actors = []
    for e in spec.evaluators:
        values = table[e.id]
        position = int(np.argmax(values))
        actors.append(
            Actor(e.id, e.capability, position=position, utility=TableUtility(values),
                  vote_weight=e.vote_weight, ideals=e.ideals, saliences=e.saliences)
        )
    return Scenario(
        space,
        tuple(actors),
        voting_rule=spec.voting_rule,
        commitment=spec.commitment,
        abstention_enabled=spec.abstention_enabled,
        epsilon_scale=spec.epsilon_scale,
    )


def matching_utility(spec: ParliamentSpec, assignment: OptionId, actor: Actor) -> float:
    """Seat-matching variant: each issue is controlled solely by its seat holder.

    The per-issue forecast degenerates to the holder's ideal, so this reuses
    the same RMS-and-salience scoring with point-mass forecasts.
    """
    space = MatchingSpace(len(spec.issues), len(spec.parties))
    holders = space.decode(assignment)
    forecasts = [
        ([spec.parties[h].ideals[s]], np.array([1.0])) for s, h in enumerate(holders)
    ]
    return _score_forecasts(spec, forecasts, actor)


def build_matching_scenario(spec: ParliamentSpec) -> Scenario:
    """First-stage scenario over seat assignments, one seat per issue."""
    space = MatchingSpace(len(spec.issues), len(spec.parties))
    actors = []
    for e in spec.evaluators:
        values = tuple(matching_utility(spec, a, e) for a in range(space.option_count))
        actors.append(
            Actor(e.id, e.capability, position=int(np.argmax(values)),
                  utility=TableUtility(values), vote_weight=e.vote_weight,
                  ideals=e.ideals, saliences=e.saliences)
        )
    return Scenario(
        space,
        tuple(actors),
        voting_rule=spec.voting_rule,
        commitment=spec.commitment,
        abstention_enabled=spec.abstention_enabled,
        epsilon_scale=spec.epsilon_scale,
    )
