"""Strategy analysis on the forecast response surface.

Because the forecast is a smooth function of capabilities, influence
strategies can be scored by expected utility, differentiated numerically,
and improved by projected gradient ascent under a budget.  Large issue sets
are handled by pairwise-retention local search instead of enumeration.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .coalitions import VictoryMatrix, victory_matrix
from .markov import limiting_distribution
from .model import (
    Actor,
    DomainError,
    Grid1D,
    IssueSet,
    MatchingSpace,
    OptionId,
    Scenario,
    SubsetSpace,
    utility_of,
)
from .voting import group_vote

DEFAULT_ROBUST_THRESHOLD = 0.1
DEFAULT_GRADIENT_STEP = 1e-4


def expected_utility(actor: Actor, distribution, issue_set: IssueSet, options=None) -> float:
    """Forecast-weighted utility; linear in the distribution.

    ``options`` names the option behind each component; by default the
    distribution ranges over the whole issue set.
    """
    p = np.asarray(distribution, dtype=float)
    if options is None:
        options = range(issue_set.option_count)
    options = list(options)
    if len(options) != len(p):
        raise DomainError("distribution length must match its option list")
    return float(sum(pi * utility_of(actor, o, issue_set) for pi, o in zip(p, options)))


def outcome_risk_rms(
    actor: Actor,
    distribution,
    issue_set: IssueSet,
    options=None,
    goal: OptionId | None = None,
) -> float:
    """RMS deviation of the forecast from the actor's goal.

    Distance is coordinate distance on a 1-D grid and utility shortfall
    (1 - U) elsewhere.
    """
    p = np.asarray(distribution, dtype=float)
    if options is None:
        options = range(issue_set.option_count)
    options = list(options)
    if goal is None:
        goal = actor.position
    if isinstance(issue_set, Grid1D):
        g = issue_set.coordinate(goal)
        d2 = [(issue_set.coordinate(o) - g) ** 2 for o in options]
    else:
        d2 = [(1.0 - utility_of(actor, o, issue_set)) ** 2 for o in options]
    return float(np.sqrt(np.dot(p, d2)))


# ---------------------------------------------------------------------------
# Capability-allocation strategies


@dataclass(frozen=True)
class StrategyDimension:
    """One lever: add capability (possibly negative) to the named actor."""

    actor_id: str
    lower: float = 0.0
    upper: float = float("inf")


@dataclass(frozen=True)
class StrategyVector:
    dimensions: tuple[StrategyDimension, ...]
    deltas: tuple[float, ...]
    budget: float

    def __post_init__(self):
        if len(self.deltas) != len(self.dimensions):
            raise DomainError("one delta per strategy dimension")
        if self.budget < 0:
            raise DomainError("budget must be nonnegative")

    def spent(self) -> float:
        return sum(abs(d) for d in self.deltas)


def apply_strategy(scenario: Scenario, vector: StrategyVector) -> Scenario:
    """Return the perturbed scenario; defaulted vote weights track capability."""
    shift = {}
    for dim, d in zip(vector.dimensions, vector.deltas):
        shift[dim.actor_id] = shift.get(dim.actor_id, 0.0) + d
    actors = []
    for a in scenario.actors:
        d = shift.get(a.id, 0.0)
        if d == 0.0:
            actors.append(a)
            continue
        c = a.capability + d
        if c < 0:
            raise DomainError(f"strategy drives {a.id!r} capability below zero")
        w = c if a.vote_weight == a.capability else a.vote_weight
        actors.append(dataclasses.replace(a, capability=c, vote_weight=w))
    return dataclasses.replace(scenario, actors=tuple(actors))


def forecast_expected_utility(scenario: Scenario, strategist_id: str) -> float:
    """Full pipeline: coalitions -> victory matrix -> forecast -> expected utility."""
    strategist = scenario.actor_by_id(strategist_id)
    vm = victory_matrix(scenario)
    rates = None if scenario.challenge_rates is None else np.asarray(scenario.challenge_rates)
    p, diag = limiting_distribution(vm, rates)
    if not diag.converged:
        raise DomainError("forecast solve did not converge at a probe point")
    options = [a.position for a in scenario.actors]
    return expected_utility(strategist, p, scenario.issue_set, options)


def response_gradient(
    scenario: Scenario,
    strategist_id: str,
    dimensions,
    h: float = DEFAULT_GRADIENT_STEP,
    at: StrategyVector | None = None,
) -> np.ndarray:
    """Central-difference gradient of the strategist's expected utility."""
    if h <= 0:
        raise DomainError("finite-difference step must be positive")
    dimensions = tuple(dimensions)
    base = at.deltas if at is not None else (0.0,) * len(dimensions)
    budget = at.budget if at is not None else float("inf")
    grad = np.empty(len(dimensions))
    for k in range(len(dimensions)):
        probes = []
        for sign in (+1.0, -1.0):
            deltas = list(base)
            deltas[k] += sign * h
            vec = StrategyVector(dimensions, tuple(deltas), max(budget, sum(map(abs, deltas))))
            probes.append(forecast_expected_utility(apply_strategy(scenario, vec), strategist_id))
        grad[k] = (probes[0] - probes[1]) / (2.0 * h)
    return grad


def _project(deltas: np.ndarray, dimensions, scenario: Scenario, budget: float) -> np.ndarray:
    """Clip to per-dimension bounds and the capability floor, then scale into budget."""
    out = deltas.copy()
    for k, dim in enumerate(dimensions):
        cap = scenario.actor_by_id(dim.actor_id).capability
        out[k] = min(max(out[k], dim.lower, -cap), dim.upper)
    spent = np.abs(out).sum()
    if spent > budget:
        out *= budget / spent if budget > 0 else 0.0
    return out


@dataclass(frozen=True)
class OptimizeResult:
    strategy: StrategyVector
    baseline: float
    achieved: float
    trace: tuple[float, ...]
    iterations: int


def optimize_strategy(
    scenario: Scenario,
    strategist_id: str,
    dimensions,
    budget: float,
    iters: int = 30,
    h: float = DEFAULT_GRADIENT_STEP,
    max_halvings: int = 20,
) -> OptimizeResult:
    """Projected gradient ascent on the forecast response surface.

    Steps are backtracked (halved) until they improve the objective; the
    returned strategy always satisfies the budget and bounds, and the trace
    of objective values is non-decreasing.
    """
    if budget < 0:
        raise DomainError("budget must be nonnegative")
    dimensions = tuple(dimensions)
    for dim in dimensions:
        if dim.lower > dim.upper:
            raise DomainError(f"infeasible bounds on {dim.actor_id!r}")
    deltas = np.zeros(len(dimensions))
    baseline = forecast_expected_utility(scenario, strategist_id)
    value = baseline
    trace = [value]
    if budget == 0 or not dimensions:
        vec = StrategyVector(dimensions, tuple(deltas), budget)
        return OptimizeResult(vec, baseline, value, tuple(trace), 0)
    step = max(budget, 1.0)
    it = 0
    for it in range(1, iters + 1):
        current = StrategyVector(dimensions, tuple(deltas), budget)
        grad = response_gradient(scenario, strategist_id, dimensions, h, at=current)
        if not np.any(grad):
            break
        improved = False
        trial_step = step
        for _ in range(max_halvings + 1):
            cand = _project(deltas + trial_step * grad, dimensions, scenario, budget)
            vec = StrategyVector(dimensions, tuple(cand), budget)
            cand_value = forecast_expected_utility(apply_strategy(scenario, vec), strategist_id)
            if cand_value > value:
                deltas, value = cand, cand_value
                step = trial_step
                improved = True
                break
            trial_step /= 2.0
        trace.append(value)
        if not improved:
            break
    vec = StrategyVector(dimensions, tuple(float(d) for d in deltas), budget)
    return OptimizeResult(vec, baseline, value, tuple(trace), it)


# ---------------------------------------------------------------------------
# Robustness and local search


@dataclass(frozen=True)
class RobustnessReport:
    winner: OptionId | None
    margin: float  # min over rivals of P[winner, rival] - 1/2
    label: str  # "robust" | "marginal" | "none"
    probability_gap: float  # top-two gap in the forecast


def classify_robustness(
    P, p, robust_threshold: float = DEFAULT_ROBUST_THRESHOLD
) -> RobustnessReport:
    """Grade the strong winner (if any) by how decisively it beats every rival."""
    probs = P.probabilities if isinstance(P, VictoryMatrix) else np.asarray(P, dtype=float)
    p = np.asarray(p, dtype=float)
    n = probs.shape[0]
    if p.shape != (n,):
        raise DomainError("forecast length must match the victory matrix")
    ordered = np.sort(p)[::-1]
    gap = float(ordered[0] - ordered[1]) if n > 1 else 1.0
    for i in range(n):
        rivals = np.delete(probs[i], i)
        margin = float(rivals.min() - 0.5) if rivals.size else 0.0
        if margin > 0:
            label = "robust" if margin >= robust_threshold else "marginal"
            return RobustnessReport(i, margin, label, gap)
    return RobustnessReport(None, 0.0, "none", gap)


def grid_neighbors(issue_set: Grid1D):
    def neighbors(o: OptionId):
        if o > 0:
            yield o - 1
        if o < issue_set.option_count - 1:
            yield o + 1

    return neighbors


def subset_neighbors(issue_set: SubsetSpace):
    """Single-bit membership flips (skipping the excluded empty subset)."""

    def neighbors(o: OptionId):
        bits = list(issue_set.decode(o))
        for b in range(issue_set.m):
            flipped = bits.copy()
            flipped[b] ^= 1
            if any(flipped) or issue_set.include_empty:
                yield issue_set.encode(flipped)

    return neighbors


def matching_neighbors(issue_set: MatchingSpace):
    """Reassign one seat to a different faction."""

    def neighbors(o: OptionId):
        assignment = list(issue_set.decode(o))
        for seat in range(issue_set.seats):
            for f in range(issue_set.factions):
                if f != assignment[seat]:
                    changed = assignment.copy()
                    changed[seat] = f
                    yield issue_set.encode(changed)

    return neighbors


@dataclass(frozen=True)
class LocalSearchResult:
    option: OptionId
    trace: tuple[OptionId, ...]
    converged: bool
    comparisons: int


def local_search_cw(
    scenario: Scenario,
    neighbors,
    start: OptionId,
    max_steps: int = 10_000,
) -> LocalSearchResult:
    """Pairwise-retention hill climb: a challenger must strictly beat the incumbent.

    Terminates at an option no neighbor defeats (a local winner; under the
    proportional rule this is a local maximum of the social utility).
    Different starts may settle in different basins.
    """
    scenario.issue_set.check_option(start)
    incumbent = start
    trace = [start]
    comparisons = 0
    for _ in range(max_steps):
        challenger = None
        for q in neighbors(incumbent):
            comparisons += 1
            if group_vote(scenario.voting_rule, scenario.actors, q, incumbent, scenario.issue_set) > 0:
                challenger = q
                break
        if challenger is None:
            return LocalSearchResult(incumbent, tuple(trace), True, comparisons)
        incumbent = challenger
        trace.append(incumbent)
    return LocalSearchResult(incumbent, tuple(trace), False, comparisons)
