"""Core domain types: issue sets, utility specifications, actors, scenarios.

Everything here is an immutable value object.  Options are identified by
their integer index into the issue set's option list.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

OptionId = int

ENUMERATION_BOUND = 4096
EMBEDDING_BOUND = 8  # factorial enumeration of orderings
SUBSET_M_BOUND = 20


class NpceError(Exception):
    """Base class for all library errors."""


class ConfigurationError(NpceError):
    """A spec or scenario is internally inconsistent."""


class CapacityError(NpceError):
    """An enumeration bound would be exceeded."""


class DomainError(NpceError):
    """An argument is outside an operation's domain."""


class VotingRule(Enum):
    BINARY = "binary"
    PROPORTIONAL = "proportional"
    CUBIC = "cubic"


class Commitment(Enum):
    UNCOMMITTED = "uncommitted"
    SEMI_COMMITTED = "semi_committed"
    FULLY_COMMITTED = "fully_committed"


# ---------------------------------------------------------------------------
# Issue sets


class IssueSet:
    """Finite enumeration of the options under contention."""

    @property
    def option_count(self) -> int:
        raise NotImplementedError

    def check_option(self, option: OptionId) -> None:
        if not 0 <= option < self.option_count:
            raise DomainError(f"option {option} out of range [0, {self.option_count})")

    def label(self, option: OptionId) -> str:
        return str(option)


@dataclass(frozen=True)
class ExplicitList(IssueSet):
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) < 1:
            raise ConfigurationError("explicit issue set needs at least one option")

    @property
    def option_count(self) -> int:
        return len(self.labels)

    def label(self, option: OptionId) -> str:
        return self.labels[option]


@dataclass(frozen=True)
class Grid1D(IssueSet):
    """Evenly spaced coordinates on [lo, hi]."""

    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ConfigurationError("grid needs at least 2 steps")
        if not self.lo < self.hi:
            raise ConfigurationError("grid requires lo < hi")

    @property
    def option_count(self) -> int:
        return self.steps

    @property
    def span(self) -> float:
        return self.hi - self.lo

    def coordinate(self, option: OptionId) -> float:
        self.check_option(option)
        return self.lo + option * (self.hi - self.lo) / (self.steps - 1)

    def coordinates(self) -> list[float]:
        return [self.coordinate(i) for i in range(self.steps)]

    def nearest_option(self, x: float) -> OptionId:
        i = round((x - self.lo) / (self.hi - self.lo) * (self.steps - 1))
        return min(max(int(i), 0), self.steps - 1)

    def label(self, option: OptionId) -> str:
        return f"{self.coordinate(option):g}"


@dataclass(frozen=True)
class SubsetSpace(IssueSet):
    """All subsets of m parties; the empty subset is excluded by default."""

    m: int
    include_empty: bool = False

    def __post_init__(self):
        if not 1 <= self.m <= SUBSET_M_BOUND:
            raise CapacityError(f"subset space supports 1..{SUBSET_M_BOUND} members, got {self.m}")

    @property
    def option_count(self) -> int:
        return 2**self.m if self.include_empty else 2**self.m - 1

    def _mask(self, option: OptionId) -> int:
        self.check_option(option)
        return option if self.include_empty else option + 1

    def decode(self, option: OptionId) -> tuple[int, ...]:
        """Membership bits, party 0 first."""
        mask = self._mask(option)
        return tuple((mask >> b) & 1 for b in range(self.m))

    def encode(self, bits) -> OptionId:
        if len(bits) != self.m:
            raise DomainError(f"expected {self.m} membership bits")
        mask = sum(1 << b for b, bit in enumerate(bits) if bit)
        if mask == 0 and not self.include_empty:
            raise DomainError("empty subset is not an option in this space")
        return mask if self.include_empty else mask - 1

    def members(self, option: OptionId) -> tuple[int, ...]:
        return tuple(b for b, bit in enumerate(self.decode(option)) if bit)

    def label(self, option: OptionId) -> str:
        return "{" + ",".join(str(b) for b in self.members(option)) + "}"


@dataclass(frozen=True)
class MatchingSpace(IssueSet):
    """Assignments of factions to seats; seats are ordered, factions reusable."""

    seats: int
    factions: int

    def __post_init__(self):
        if self.seats < 1 or self.factions < 1:
            raise ConfigurationError("matching space needs at least one seat and one faction")
        if self.factions**self.seats > ENUMERATION_BOUND:
            raise CapacityError(
                f"{self.factions}^{self.seats} matchings exceed the enumeration bound"
            )

    @property
    def option_count(self) -> int:
        return self.factions**self.seats

    def decode(self, option: OptionId) -> tuple[int, ...]:
        """Faction index per seat, most significant seat first."""
        self.check_option(option)
        digits = []
        x = option
        for _ in range(self.seats):
            digits.append(x % self.factions)
            x //= self.factions
        return tuple(reversed(digits))

    def encode(self, assignment) -> OptionId:
        if len(assignment) != self.seats:
            raise DomainError(f"expected {self.seats} seat assignments")
        x = 0
        for f in assignment:
            if not 0 <= f < self.factions:
                raise DomainError(f"faction index {f} out of range")
            x = x * self.factions + f
        return x

    def label(self, option: OptionId) -> str:
        return "(" + ",".join(str(f) for f in self.decode(option)) + ")"


# ---------------------------------------------------------------------------
# Utility specifications


class UtilitySpec:
    """Maps options of an issue set to utilities in [0, 1]."""

    def value(self, option: OptionId, issue_set: IssueSet) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class TableUtility(UtilitySpec):
    values: tuple[float, ...]

    def __post_init__(self):
        for v in self.values:
            if not 0.0 <= v <= 1.0:
                raise ConfigurationError(f"table utility {v} outside [0, 1]")

    def value(self, option: OptionId, issue_set: IssueSet) -> float:
        if len(self.values) != issue_set.option_count:
            raise ConfigurationError(
                f"utility table has {len(self.values)} entries for "
                f"{issue_set.option_count} options"
            )
        issue_set.check_option(option)
        return self.values[option]


@dataclass(frozen=True)
class Distance1D(UtilitySpec):
    """Peak 1 at the ideal coordinate, declining to 0 at the farthest grid end."""

    ideal: float
    shape: str = "linear"  # or "quadratic"

    def __post_init__(self):
        if self.shape not in ("linear", "quadratic"):
            raise ConfigurationError(f"unknown distance shape {self.shape!r}")

    def value(self, option: OptionId, issue_set: IssueSet) -> float:
        if not isinstance(issue_set, Grid1D):
            raise ConfigurationError("Distance1D utility requires a Grid1D issue set")
        x = issue_set.coordinate(option)
        reach = max(issue_set.hi - self.ideal, self.ideal - issue_set.lo)
        d = abs(x - self.ideal) / reach if reach > 0 else 0.0
        return 1.0 - d if self.shape == "linear" else 1.0 - d * d


@dataclass(frozen=True)
class PiecewisePeaks(UtilitySpec):
    """Linear interpolation through (coordinate, utility) knots.

    Queries outside the knot range clamp to the boundary knot value, so the
    utility stays total on any grid.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.knots) < 1:
            raise ConfigurationError("piecewise utility needs at least one knot")
        xs = [x for x, _ in self.knots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ConfigurationError("piecewise knots must be strictly increasing")
        for _, u in self.knots:
            if not 0.0 <= u <= 1.0:
                raise ConfigurationError(f"knot utility {u} outside [0, 1]")

    def value(self, option: OptionId, issue_set: IssueSet) -> float:
        if not isinstance(issue_set, Grid1D):
            raise ConfigurationError("PiecewisePeaks utility requires a Grid1D issue set")
        x = issue_set.coordinate(option)
        knots = self.knots
        if x <= knots[0][0]:
            return knots[0][1]
        if x >= knots[-1][0]:
            return knots[-1][1]
        for (x0, u0), (x1, u1) in zip(knots, knots[1:]):
            if x0 <= x <= x1:
                t = (x - x0) / (x1 - x0)
                return u0 + t * (u1 - u0)
        raise AssertionError("unreachable: knots cover the clamped range")


# ---------------------------------------------------------------------------
# Actors and scenarios


@dataclass(frozen=True)
class Actor:
    """A power wielder: capability scales effort, utility orders options.

    ``ideals`` and ``saliences`` are only consulted by the nested
    government-formation utility model; they are per-issue, not per-option.
    """

    id: str
    capability: float
    position: OptionId = 0
    utility: UtilitySpec | None = None
    vote_weight: float | None = None
    ideals: tuple[float, ...] = ()
    saliences: tuple[float, ...] = ()

    def __post_init__(self):
        if self.vote_weight is None:
            object.__setattr__(self, "vote_weight", self.capability)
        object.__setattr__(self, "ideals", tuple(self.ideals))
        object.__setattr__(self, "saliences", tuple(self.saliences))


@dataclass(frozen=True)
class Scenario:
    issue_set: IssueSet
    actors: tuple[Actor, ...]
    voting_rule: VotingRule = VotingRule.PROPORTIONAL
    commitment: Commitment = Commitment.UNCOMMITTED
    abstention_enabled: bool = False
    challenge_rates: tuple[tuple[float, ...], ...] | None = None  # None = uniform
    epsilon_scale: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "actors", tuple(self.actors))
        if self.challenge_rates is not None:
            object.__setattr__(
                self, "challenge_rates", tuple(tuple(row) for row in self.challenge_rates)
            )

    def actor_by_id(self, actor_id: str) -> Actor:
        for a in self.actors:
            if a.id == actor_id:
                return a
        raise DomainError(f"no actor with id {actor_id!r}")


# ---------------------------------------------------------------------------
# Operations


def utility_of(actor: Actor, option: OptionId, issue_set: IssueSet) -> float:
    """Utility of one option to one actor, guaranteed in [0, 1]."""
    if actor.utility is None:
        raise ConfigurationError(f"actor {actor.id!r} has no utility specification")
    return actor.utility.value(option, issue_set)


def state_utility(actor: Actor, positions, issue_set: IssueSet) -> float:
    """Utility of a full state, the sum over all held positions."""
    positions = list(positions)
    if not positions:
        raise DomainError("state utility of an empty position list is undefined")
    return sum(utility_of(actor, p, issue_set) for p in positions)


@dataclass(frozen=True)
class Violation:
    path: str
    message: str


def validate_scenario(s: Scenario) -> list[Violation]:
    """Collect invariant violations; an empty list means the scenario is sound."""
    out: list[Violation] = []
    if len(s.actors) < 2:
        out.append(Violation("actors", "a scenario needs at least two actors"))
    n = s.issue_set.option_count
    for i, a in enumerate(s.actors):
        path = f"actors[{i}]"
        if a.capability < 0:
            out.append(Violation(f"{path}.capability", f"capability {a.capability} < 0"))
        if a.vote_weight < 0:
            out.append(Violation(f"{path}.vote_weight", f"vote weight {a.vote_weight} < 0"))
        if not 0 <= a.position < n:
            out.append(Violation(f"{path}.position", f"position {a.position} not in [0, {n})"))
        if any(sal < 0 for sal in a.saliences):
            out.append(Violation(f"{path}.saliences", "saliences must be nonnegative"))
        if isinstance(a.utility, TableUtility) and len(a.utility.values) != n:
            out.append(
                Violation(
                    f"{path}.utility",
                    f"table has {len(a.utility.values)} entries for {n} options",
                )
            )
        if isinstance(a.utility, (Distance1D, PiecewisePeaks)) and not isinstance(
            s.issue_set, Grid1D
        ):
            out.append(Violation(f"{path}.utility", "coordinate utility on a non-grid issue set"))
        if a.utility is None:
            out.append(Violation(f"{path}.utility", "actor has no utility specification"))
    if s.epsilon_scale <= 0:
        out.append(Violation("epsilon_scale", f"epsilon scale {s.epsilon_scale} must be > 0"))
    if s.challenge_rates is not None:
        rows = s.challenge_rates
        if len(rows) != len(s.actors) or any(len(r) != len(s.actors) for r in rows):
            out.append(Violation("challenge_rates", "challenge matrix must be n x n over actors"))
        else:
            for i, row in enumerate(rows):
                if any(c < 0 for c in row):
                    out.append(Violation(f"challenge_rates[{i}]", "negative challenge rate"))
                if sum(c for j, c in enumerate(row) if j != i) > 1 + 1e-12:
                    out.append(
                        Violation(f"challenge_rates[{i}]", "off-diagonal challenge rates sum > 1")
                    )
    return out


def _unimodal(values: list[float]) -> bool:
    # Non-strict: ties never break unimodality, a rise after a fall does.
    falling = False
    for prev, cur in zip(values, values[1:]):
        if cur < prev:
            falling = True
        elif cur > prev and falling:
            return False
    return True


@dataclass(frozen=True)
class EmbeddingResult:
    embeddable: bool
    ordering: tuple[OptionId, ...] | None
    checked_orderings: int


def validate_spatial_embedding(options, actors, issue_set: IssueSet) -> EmbeddingResult:
    """Search for a linear ordering making every actor's utility unimodal.

    Exhaustive over all orderings, so the option count is capped.  Returns
    the first witness ordering found, or the total number of orderings
    refuted.
    """
    options = list(options)
    if len(options) > EMBEDDING_BOUND:
        raise CapacityError(f"embedding check enumerates orderings; max {EMBEDDING_BOUND} options")
    utilities = {a.id: [utility_of(a, o, issue_set) for o in options] for a in actors}
    checked = 0
    for perm in itertools.permutations(range(len(options))):
        checked += 1
        if all(_unimodal([u[i] for i in perm]) for u in utilities.values()):
            return EmbeddingResult(True, tuple(options[i] for i in perm), checked)
    return EmbeddingResult(False, None, checked)
