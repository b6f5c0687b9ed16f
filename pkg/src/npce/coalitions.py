"""Coalition assembly: third-party support, contest strengths, victory odds.

A contest pits two position-holding principals against each other; every
other actor may support one side, support the other, or sit on the fence.
Strengths feed the victory probability P[i beats j] = C_ij / (C_ij + C_ji),
with a small epsilon floor so exact ties come out at 50:50.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    Actor,
    Commitment,
    DomainError,
    IssueSet,
    Scenario,
    VotingRule,
    utility_of,
)
from .voting import rule_effort


def _stake(actor: Actor, a, b, issue_set: IssueSet) -> float:
    return utility_of(actor, a, issue_set) - utility_of(actor, b, issue_set)


def third_party_vote(
    k: Actor,
    i: Actor,
    j: Actor,
    issue_set: IssueSet,
    commitment: Commitment,
    rule: VotingRule = VotingRule.PROPORTIONAL,
) -> float:
    """Signed effort k exerts for i's position against j's.

    The commitment model fixes what k risks; the voting rule shapes how the
    resulting expected-utility edge translates into effort.  Under the
    proportional rule the fully-committed vote is exactly 3/2 the
    uncommitted one.
    """
    if k.id in (i.id, j.id):
        raise DomainError("third party must be distinct from both principals")
    total = i.capability + k.capability + j.capability
    if total <= 0:
        return 0.0
    u_i = utility_of(k, i.position, issue_set)
    u_j = utility_of(k, j.position, issue_set)
    base = k.capability / total * (u_i - u_j)
    if commitment is Commitment.UNCOMMITTED:
        du = 2.0 * base
    elif commitment is Commitment.FULLY_COMMITTED:
        du = 3.0 * base
    else:
        u_k = utility_of(k, k.position, issue_set)
        penalty = (i.capability * (u_k - u_i) - j.capability * (u_k - u_j)) / total
        du = 2.0 * base + penalty
    return rule_effort(rule, k.vote_weight, du)


@dataclass(frozen=True)
class AbstentionDecision:
    abstain: bool
    u_abstain: float
    u_support_i: float
    u_support_j: float


def abstention_decision(
    k: Actor, i: Actor, j: Actor, issue_set: IssueSet, commitment: Commitment
) -> AbstentionDecision:
    """Compare k's expected utilities of supporting i, supporting j, or neither.

    Abstention wins ties: support that confers no strict gain is not worth
    the exposure.
    """
    if k.id in (i.id, j.id):
        raise DomainError("third party must be distinct from both principals")
    ci, cj, ck = i.capability, j.capability, k.capability
    u_i = utility_of(k, i.position, issue_set)
    u_j = utility_of(k, j.position, issue_set)
    u_k = utility_of(k, k.position, issue_set)

    # Outcome values per side: winner's position is adopted by the loser;
    # whether k keeps its own position depends on the commitment model.
    if commitment is Commitment.UNCOMMITTED:
        win_i, lose_j = 2 * u_i + u_k, 2 * u_j + u_k
        win_j, lose_i = 2 * u_j + u_k, 2 * u_i + u_k
    elif commitment is Commitment.SEMI_COMMITTED:
        win_i, lose_j = 2 * u_i + u_k, 3 * u_j
        win_j, lose_i = 2 * u_j + u_k, 3 * u_i
    else:
        win_i, lose_j = 3 * u_i, 3 * u_j
        win_j, lose_i = 3 * u_j, 3 * u_i

    total = ci + ck + cj
    if total <= 0:
        return AbstentionDecision(True, 0.0, 0.0, 0.0)
    u_support_i = ((ci + ck) * win_i + cj * lose_j) / total
    u_support_j = (ci * lose_i + (cj + ck) * win_j) / total
    if ci + cj > 0:
        u_abstain = (ci * (2 * u_i + u_k) + cj * (2 * u_j + u_k)) / (ci + cj)
    else:
        u_abstain = 2 * u_i + u_k  # principals powerless; nothing changes
    abstain = u_abstain >= u_support_i and u_abstain >= u_support_j
    return AbstentionDecision(abstain, u_abstain, u_support_i, u_support_j)


@dataclass(frozen=True)
class CoalitionBreakdown:
    """Raw strengths and per-actor votes for one contest (i's position vs j's)."""

    i: int
    j: int
    votes: tuple[tuple[str, float], ...]
    abstainers: tuple[str, ...]
    c_for: float  # sum of positive votes (raw, before epsilon)
    c_against: float  # sum of |negative votes|
    epsilon: float

    @property
    def net_vote(self) -> float:
        return self.c_for - self.c_against

    @property
    def strength_for(self) -> float:
        return self.c_for + self.epsilon

    @property
    def strength_against(self) -> float:
        return self.c_against + self.epsilon


def coalition_breakdown(
    s: Scenario, i: int, j: int, epsilon: float | None = None
) -> CoalitionBreakdown:
    """Assemble both coalitions for the contest between actors i and j.

    Principals vote through the scenario rule on their own stakes and never
    abstain; everyone else goes through the abstention comparison (when
    enabled) and the commitment-specific support vote.  When ``epsilon`` is
    None it is derived from the RMS of this contest's two raw strengths.
    """
    if i == j:
        raise DomainError("a contest needs two distinct principals")
    ai, aj = s.actors[i], s.actors[j]
    votes: list[tuple[str, float]] = []
    abstainers: list[str] = []
    votes.append((ai.id, rule_effort(s.voting_rule, ai.capability, _stake(ai, ai.position, aj.position, s.issue_set))))
    votes.append((aj.id, rule_effort(s.voting_rule, aj.capability, _stake(aj, ai.position, aj.position, s.issue_set))))
    for idx, k in enumerate(s.actors):
        if idx in (i, j):
            continue
        if s.abstention_enabled and abstention_decision(k, ai, aj, s.issue_set, s.commitment).abstain:
            abstainers.append(k.id)
            votes.append((k.id, 0.0))
            continue
        votes.append((k.id, third_party_vote(k, ai, aj, s.issue_set, s.commitment, s.voting_rule)))
    c_for = sum(v for _, v in votes if v > 0)
    c_against = sum(-v for _, v in votes if v < 0)
    if epsilon is None:
        rms = math.sqrt((c_for**2 + c_against**2) / 2.0)
        epsilon = s.epsilon_scale * rms if rms > 0 else s.epsilon_scale
    return CoalitionBreakdown(
        i, j, tuple(votes), tuple(abstainers), c_for, c_against, epsilon
    )


def victory_probability(b: CoalitionBreakdown) -> float:
    total = b.strength_for + b.strength_against
    if total == 0:
        return 0.5
    return b.strength_for / total


@dataclass(frozen=True)
class VictoryMatrix:
    """Pairwise victory probabilities over the scenario's position holders."""

    probabilities: np.ndarray

    @property
    def n(self) -> int:
        return self.probabilities.shape[0]

    def check(self, tol: float = 1e-15) -> None:
        p = self.probabilities
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DomainError("victory matrix must be square")
        if np.any(p < -tol) or np.any(p > 1 + tol):
            raise DomainError("victory probabilities must lie in [0, 1]")
        if np.max(np.abs(p + p.T - 1.0)) > tol:
            raise DomainError("victory matrix must satisfy P + P^T = 1")


def victory_matrix(s: Scenario) -> VictoryMatrix:
    """All-pairs victory probabilities with one shared epsilon floor.

    Epsilon is a fixed fraction of the RMS over every raw strength in the
    assembly, so rescaling all capabilities leaves the matrix unchanged.
    """
    n = len(s.actors)
    if n < 2:
        raise DomainError("victory matrix needs at least two actors")
    raw: dict[tuple[int, int], CoalitionBreakdown] = {}
    strengths: list[float] = []
    for i in range(n):
        for j in range(i + 1, n):
            b = coalition_breakdown(s, i, j, epsilon=0.0)
            raw[(i, j)] = b
            strengths.extend((b.c_for, b.c_against))
    rms = math.sqrt(sum(c * c for c in strengths) / len(strengths))
    eps = s.epsilon_scale * rms if rms > 0 else s.epsilon_scale
    p = np.full((n, n), 0.5)
    for (i, j), b in raw.items():
        pij = victory_probability(dataclasses.replace(b, epsilon=eps))
        p[i, j] = pij
        p[j, i] = 1.0 - pij
    return VictoryMatrix(p)


def bilateral_victory_probability(i: Actor, j: Actor, issue_set: IssueSet) -> float:
    """Odds of i prevailing in a purely bilateral contest, scaled by stakes."""
    vi = abs(i.capability * _stake(i, i.position, j.position, issue_set))
    vj = abs(j.capability * _stake(j, i.position, j.position, issue_set))
    if vi + vj == 0:
        return 0.5
    return vi / (vi + vj)


def challenge_incentive(i: Actor, j: Actor, issue_set: IssueSet) -> float:
    """Expected gain to i from forcing a one-on-one contest with j.

    Positive when i's stake-scaled effort outweighs j's and i prefers its
    own position; a weak-but-motivated actor can show a positive incentive
    against a strong-but-indifferent one.
    """
    vi = abs(i.capability * _stake(i, i.position, j.position, issue_set))
    vj = abs(j.capability * _stake(j, i.position, j.position, issue_set))
    if vi + vj == 0:
        return 0.0
    return (vi - vj) / (vi + vj) * _stake(i, i.position, j.position, issue_set)
