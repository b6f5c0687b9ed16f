"""Voting rules, social utility, and deterministic Condorcet classification."""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    ENUMERATION_BOUND,
    Actor,
    CapacityError,
    DomainError,
    Grid1D,
    IssueSet,
    OptionId,
    VotingRule,
    utility_of,
)

ZERO_VOTE = 1e-12  # below this, a vote is numerically an abstention


def rule_effort(rule: VotingRule, weight: float, du: float) -> float:
    """Effort exerted by an actor of the given weight for a utility edge du."""
    if rule is VotingRule.BINARY:
        if du > ZERO_VOTE:
            return weight
        if du < -ZERO_VOTE:
            return -weight
        return 0.0
    if rule is VotingRule.PROPORTIONAL:
        return weight * du
    return weight * du**3


def individual_vote(
    rule: VotingRule, actor: Actor, a: OptionId, b: OptionId, issue_set: IssueSet
) -> float:
    """Signed effort for option a against option b; antisymmetric in (a, b)."""
    du = utility_of(actor, a, issue_set) - utility_of(actor, b, issue_set)
    return rule_effort(rule, actor.capability, du)


def group_vote(rule: VotingRule, actors, a: OptionId, b: OptionId, issue_set: IssueSet) -> float:
    return sum(individual_vote(rule, k, a, b, issue_set) for k in actors)


def social_utility(actors, option: OptionId, issue_set: IssueSet) -> float:
    """Capability-weighted sum of utilities; its argmax is the central position."""
    return sum(k.capability * utility_of(k, option, issue_set) for k in actors)


def luce_vote_probability(actor: Actor, a: OptionId, b: OptionId, issue_set: IssueSet) -> float:
    """Probability the actor votes a over b in the probabilistic binary model."""
    return (1.0 + utility_of(actor, a, issue_set) - utility_of(actor, b, issue_set)) / 2.0


@dataclass(frozen=True)
class CondorcetClassification:
    kind: str  # "strong" | "weak" | "none"
    winner: OptionId | None
    winners: tuple[OptionId, ...]
    margins: tuple[float, ...]  # per option: min over rivals of V(option : rival)


def condorcet_classify(
    rule: VotingRule,
    actors,
    options,
    issue_set: IssueSet,
    bound: int = ENUMERATION_BOUND,
) -> CondorcetClassification:
    """Classify the strong/weak winner of the deterministic pairwise tournament.

    Margins are reported per option so marginal-vs-robust analysis needs no
    recomputation.  Votes within ZERO_VOTE of zero count as exact ties.
    """
    options = list(options)
    if not 1 <= len(options) <= bound:
        raise CapacityError(f"classification enumerates pairs; 1..{bound} options supported")
    margins = []
    for a in options:
        rival_votes = [group_vote(rule, actors, a, b, issue_set) for b in options if b != a]
        margins.append(min(rival_votes) if rival_votes else 0.0)

    strong = [o for o, m in zip(options, margins) if m > ZERO_VOTE]
    if strong:
        return CondorcetClassification("strong", strong[0], tuple(strong), tuple(margins))
    weak = []
    for a, m in zip(options, margins):
        if m >= -ZERO_VOTE and any(
            group_vote(rule, actors, a, b, issue_set) > ZERO_VOTE for b in options if b != a
        ):
            weak.append(a)
    if weak:
        return CondorcetClassification("weak", None, tuple(weak), tuple(margins))
    return CondorcetClassification("none", None, (), tuple(margins))


def median_voter_position(actors, grid: Grid1D) -> OptionId:
    """Smallest coordinate where cumulative capability reaches half the total."""
    actors = list(actors)
    if not actors:
        raise DomainError("median of an empty actor list is undefined")
    total = sum(a.capability for a in actors)
    if total <= 0:
        raise DomainError("median requires positive total capability")
    cumulative = 0.0
    for a in sorted(actors, key=lambda a: grid.coordinate(a.position)):
        cumulative += a.capability
        if cumulative >= total / 2.0:
            return a.position
    return actors[-1].position  # unreachable barring rounding
