"""Strict JSON scenario files: versioned, diffable, rejected on unknown keys.

Every parse error carries the path of the offending field so
misconfigurations fail loudly instead of silently changing the model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .generators import ParliamentSpec
from .model import (
    Actor,
    Commitment,
    ConfigurationError,
    ExplicitList,
    Grid1D,
    IssueSet,
    MatchingSpace,
    NpceError,
    Scenario,
    SubsetSpace,
    TableUtility,
    Distance1D,
    PiecewisePeaks,
    UtilitySpec,
    VotingRule,
)
from .strategy import StrategyDimension

SCHEMA_VERSION = "1"


class SchemaError(NpceError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def _check_keys(obj: dict, path: str, required: tuple, optional: tuple = ()) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(path, f"expected an object, got {type(obj).__name__}")
    for key in obj:
        if key not in required and key not in optional:
            raise SchemaError(f"{path}.{key}", "unknown key")
    for key in required:
        if key not in obj:
            raise SchemaError(f"{path}.{key}", "missing required key")


def _number(obj, path: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise SchemaError(path, "expected a number")
    return float(obj)


def _integer(obj, path: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise SchemaError(path, "expected an integer")
    return obj


def _string(obj, path: str) -> str:
    if not isinstance(obj, str):
        raise SchemaError(path, "expected a string")
    return obj


def _array(obj, path: str) -> list:
    if not isinstance(obj, list):
        raise SchemaError(path, "expected an array")
    return obj


def _enum(obj, path: str, cls):
    name = _string(obj, path)
    try:
        return cls(name)
    except ValueError:
        valid = ", ".join(v.value for v in cls)
        raise SchemaError(path, f"expected one of: {valid}") from None


def parse_issue_set(obj: dict, path: str) -> IssueSet:
    _check_keys(obj, path, ("kind",), ("labels", "min", "max", "steps", "m",
                                       "include_empty", "seats", "factions"))
    kind = _string(obj["kind"], f"{path}.kind")
    try:
        if kind == "explicit":
            _check_keys(obj, path, ("kind", "labels"))
            return ExplicitList(tuple(_string(x, f"{path}.labels[{i}]")
                                      for i, x in enumerate(_array(obj["labels"], f"{path}.labels"))))
        if kind == "grid1d":
            _check_keys(obj, path, ("kind", "min", "max", "steps"))
            return Grid1D(_number(obj["min"], f"{path}.min"),
                          _number(obj["max"], f"{path}.max"),
                          _integer(obj["steps"], f"{path}.steps"))
        if kind == "subset":
            _check_keys(obj, path, ("kind", "m"), ("include_empty",))
            return SubsetSpace(_integer(obj["m"], f"{path}.m"),
                               bool(obj.get("include_empty", False)))
        if kind == "matching":
            _check_keys(obj, path, ("kind", "seats", "factions"))
            return MatchingSpace(_integer(obj["seats"], f"{path}.seats"),
                                 _integer(obj["factions"], f"{path}.factions"))
    except ConfigurationError as exc:
        raise SchemaError(path, str(exc)) from None
    raise SchemaError(f"{path}.kind", f"unknown issue set kind {kind!r}")


def parse_utility(obj: dict, path: str) -> UtilitySpec:
    _check_keys(obj, path, ("kind",), ("values", "ideal", "shape", "knots"))
    kind = _string(obj["kind"], f"{path}.kind")
    try:
        if kind == "table":
            _check_keys(obj, path, ("kind", "values"))
            return TableUtility(tuple(_number(v, f"{path}.values[{i}]")
                                      for i, v in enumerate(_array(obj["values"], f"{path}.values"))))
        if kind == "distance1d":
            _check_keys(obj, path, ("kind", "ideal"), ("shape",))
            return Distance1D(_number(obj["ideal"], f"{path}.ideal"),
                              _string(obj.get("shape", "linear"), f"{path}.shape"))
        if kind == "piecewise":
            _check_keys(obj, path, ("kind", "knots"))
            knots = []
            for i, knot in enumerate(_array(obj["knots"], f"{path}.knots")):
                pair = _array(knot, f"{path}.knots[{i}]")
                if len(pair) != 2:
                    raise SchemaError(f"{path}.knots[{i}]", "expected [coordinate, utility]")
                knots.append((_number(pair[0], f"{path}.knots[{i}][0]"),
                              _number(pair[1], f"{path}.knots[{i}][1]")))
            return PiecewisePeaks(tuple(knots))
    except ConfigurationError as exc:
        raise SchemaError(path, str(exc)) from None
    raise SchemaError(f"{path}.kind", f"unknown utility kind {kind!r}")


def parse_actor(obj: dict, path: str, *, utility_required: bool = True,
                saliences_allowed: bool = False) -> Actor:
    optional = ["position", "vote_weight", "ideals"]
    required = ["id", "capability"]
    if utility_required:
        required.append("utility")
    else:
        optional.append("utility")
    if saliences_allowed:
        optional.append("saliences")
    _check_keys(obj, path, tuple(required), tuple(optional))
    capability = _number(obj["capability"], f"{path}.capability")
    if capability < 0:
        raise SchemaError(f"{path}.capability", "capability must be nonnegative")
    vote_weight = None
    if "vote_weight" in obj:
        vote_weight = _number(obj["vote_weight"], f"{path}.vote_weight")
        if vote_weight < 0:
            raise SchemaError(f"{path}.vote_weight", "vote weight must be nonnegative")
    utility = None
    if obj.get("utility") is not None:
        utility = parse_utility(obj["utility"], f"{path}.utility")
    ideals = tuple(_number(x, f"{path}.ideals[{i}]")
                   for i, x in enumerate(_array(obj.get("ideals", []), f"{path}.ideals")))
    saliences = tuple(_number(x, f"{path}.saliences[{i}]")
                      for i, x in enumerate(_array(obj.get("saliences", []), f"{path}.saliences")))
    return Actor(
        id=_string(obj["id"], f"{path}.id"),
        capability=capability,
        position=_integer(obj.get("position", 0), f"{path}.position"),
        utility=utility,
        vote_weight=vote_weight,
        ideals=ideals,
        saliences=saliences,
    )


def parse_challenge_rates(obj, path: str):
    rows = _array(obj, path)
    return tuple(
        tuple(_number(x, f"{path}[{i}][{j}]") for j, x in enumerate(_array(row, f"{path}[{i}]")))
        for i, row in enumerate(rows)
    )


def parse_scenario(obj: dict, path: str = "scenario") -> Scenario:
    _check_keys(obj, path, ("issue_set", "actors"),
                ("voting_rule", "commitment", "abstention_enabled",
                 "challenge_rates", "epsilon_scale"))
    issue_set = parse_issue_set(obj["issue_set"], f"{path}.issue_set")
    actors = tuple(parse_actor(a, f"{path}.actors[{i}]")
                   for i, a in enumerate(_array(obj["actors"], f"{path}.actors")))
    rates = None
    if obj.get("challenge_rates") is not None:
        rates = parse_challenge_rates(obj["challenge_rates"], f"{path}.challenge_rates")
    return Scenario(
        issue_set=issue_set,
        actors=actors,
        voting_rule=_enum(obj.get("voting_rule", "proportional"), f"{path}.voting_rule", VotingRule),
        commitment=_enum(obj.get("commitment", "uncommitted"), f"{path}.commitment", Commitment),
        abstention_enabled=bool(obj.get("abstention_enabled", False)),
        challenge_rates=rates,
        epsilon_scale=_number(obj.get("epsilon_scale", 1e-6), f"{path}.epsilon_scale"),
    )


def parse_parliament(obj: dict, path: str = "parliament") -> ParliamentSpec:
    _check_keys(obj, path, ("parties", "issues", "evaluators"),
                ("voting_rule", "commitment", "abstention_enabled", "include_empty",
                 "tolerance", "max_iters", "epsilon_scale"))
    parties = tuple(parse_actor(p, f"{path}.parties[{i}]", utility_required=False)
                    for i, p in enumerate(_array(obj["parties"], f"{path}.parties")))
    issues = []
    for i, g in enumerate(_array(obj["issues"], f"{path}.issues")):
        gpath = f"{path}.issues[{i}]"
        _check_keys(g, gpath, ("min", "max", "steps"))
        try:
            issues.append(Grid1D(_number(g["min"], f"{gpath}.min"),
                                 _number(g["max"], f"{gpath}.max"),
                                 _integer(g["steps"], f"{gpath}.steps")))
        except ConfigurationError as exc:
            raise SchemaError(gpath, str(exc)) from None
    evaluators = tuple(
        parse_actor(e, f"{path}.evaluators[{i}]", utility_required=False, saliences_allowed=True)
        for i, e in enumerate(_array(obj["evaluators"], f"{path}.evaluators"))
    )
    try:
        return ParliamentSpec(
            parties=parties,
            issues=tuple(issues),
            evaluators=evaluators,
            voting_rule=_enum(obj.get("voting_rule", "proportional"), f"{path}.voting_rule", VotingRule),
            commitment=_enum(obj.get("commitment", "uncommitted"), f"{path}.commitment", Commitment),
            abstention_enabled=bool(obj.get("abstention_enabled", False)),
            include_empty=bool(obj.get("include_empty", False)),
            tolerance=_number(obj.get("tolerance", 1e-10), f"{path}.tolerance"),
            max_iters=_integer(obj.get("max_iters", 10_000), f"{path}.max_iters"),
            epsilon_scale=_number(obj.get("epsilon_scale", 1e-6), f"{path}.epsilon_scale"),
        )
    except ConfigurationError as exc:
        raise SchemaError(path, str(exc)) from None


@dataclass(frozen=True)
class StrategySpec:
    strategist: str
    dimensions: tuple[StrategyDimension, ...]
    budget: float
    iters: int = 30
    h: float = 1e-4


def parse_strategy(obj: dict, path: str = "strategy") -> StrategySpec:
    _check_keys(obj, path, ("strategist", "dimensions", "budget"), ("iters", "h"))
    dims = []
    for i, d in enumerate(_array(obj["dimensions"], f"{path}.dimensions")):
        dpath = f"{path}.dimensions[{i}]"
        _check_keys(d, dpath, ("actor",), ("lower", "upper"))
        dims.append(StrategyDimension(
            actor_id=_string(d["actor"], f"{dpath}.actor"),
            lower=_number(d.get("lower", 0.0), f"{dpath}.lower"),
            upper=_number(d.get("upper", float("inf")), f"{dpath}.upper"),
        ))
    budget = _number(obj["budget"], f"{path}.budget")
    if budget < 0:
        raise SchemaError(f"{path}.budget", "budget must be nonnegative")
    return StrategySpec(
        strategist=_string(obj["strategist"], f"{path}.strategist"),
        dimensions=tuple(dims),
        budget=budget,
        iters=_integer(obj.get("iters", 30), f"{path}.iters"),
        h=_number(obj.get("h", 1e-4), f"{path}.h"),
    )


@dataclass(frozen=True)
class SweepSpec:
    parameter: str  # dot path into the scenario object, e.g. "actors.0.capability"
    lo: float
    hi: float
    steps: int


def parse_sweep(obj: dict, path: str = "sweep") -> SweepSpec:
    _check_keys(obj, path, ("parameter", "min", "max", "steps"))
    steps = _integer(obj["steps"], f"{path}.steps")
    if steps < 1:
        raise SchemaError(f"{path}.steps", "sweep needs at least one step")
    return SweepSpec(
        parameter=_string(obj["parameter"], f"{path}.parameter"),
        lo=_number(obj["min"], f"{path}.min"),
        hi=_number(obj["max"], f"{path}.max"),
        steps=steps,
    )


@dataclass(frozen=True)
class ScenarioFile:
    schema_version: str
    scenario: Scenario | None
    p_matrix: np.ndarray | None
    parliament: ParliamentSpec | None
    strategy: StrategySpec | None
    sweep: SweepSpec | None
    raw: dict


def parse_scenario_data(data: dict, path: str = "$") -> ScenarioFile:
    _check_keys(data, path, ("schema_version",),
                ("scenario", "p_matrix", "parliament", "strategy", "sweep"))
    version = _string(data["schema_version"], f"{path}.schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{path}.schema_version",
                          f"unsupported version {version!r}; this tool reads {SCHEMA_VERSION!r}")
    p_matrix = None
    if "p_matrix" in data:
        rows = _array(data["p_matrix"], f"{path}.p_matrix")
        mat = [[_number(x, f"{path}.p_matrix[{i}][{j}]") for j, x in
                enumerate(_array(row, f"{path}.p_matrix[{i}]"))] for i, row in enumerate(rows)]
        p_matrix = np.asarray(mat, dtype=float)
        n = p_matrix.shape[0]
        if p_matrix.ndim != 2 or p_matrix.shape != (n, n):
            raise SchemaError(f"{path}.p_matrix", "must be a square matrix")
        if np.any(p_matrix < 0) or np.any(p_matrix > 1):
            raise SchemaError(f"{path}.p_matrix", "entries must lie in [0, 1]")
        if np.max(np.abs(p_matrix + p_matrix.T - 1.0)) > 1e-9:
            raise SchemaError(f"{path}.p_matrix", "must satisfy P + P^T = 1")
    scenario = parse_scenario(data["scenario"]) if "scenario" in data else None
    parliament = parse_parliament(data["parliament"]) if "parliament" in data else None
    strategy = parse_strategy(data["strategy"]) if "strategy" in data else None
    sweep = parse_sweep(data["sweep"]) if "sweep" in data else None
    return ScenarioFile(version, scenario, p_matrix, parliament, strategy, sweep, data)


def parse_scenario_file(path) -> ScenarioFile:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    return parse_scenario_data(data)


# ---------------------------------------------------------------------------
# Serialization (inverse of parsing; round-trips losslessly)


def serialize_issue_set(s: IssueSet) -> dict:
    if isinstance(s, ExplicitList):
        return {"kind": "explicit", "labels": list(s.labels)}
    if isinstance(s, Grid1D):
        return {"kind": "grid1d", "min": s.lo, "max": s.hi, "steps": s.steps}
    if isinstance(s, SubsetSpace):
        return {"kind": "subset", "m": s.m, "include_empty": s.include_empty}
    if isinstance(s, MatchingSpace):
        return {"kind": "matching", "seats": s.seats, "factions": s.factions}
    raise ConfigurationError(f"cannot serialize issue set {type(s).__name__}")


def serialize_utility(u: UtilitySpec) -> dict:
    if isinstance(u, TableUtility):
        return {"kind": "table", "values": list(u.values)}
    if isinstance(u, Distance1D):
        return {"kind": "distance1d", "ideal": u.ideal, "shape": u.shape}
    if isinstance(u, PiecewisePeaks):
        return {"kind": "piecewise", "knots": [list(k) for k in u.knots]}
    raise ConfigurationError(f"cannot serialize utility {type(u).__name__}")


def serialize_actor(a: Actor) -> dict:
    out = {"id": a.id, "capability": a.capability, "position": a.position}
    if a.utility is not None:
        out["utility"] = serialize_utility(a.utility)
    if a.vote_weight != a.capability:
        out["vote_weight"] = a.vote_weight
    if a.ideals:
        out["ideals"] = list(a.ideals)
    if a.saliences:
        out["saliences"] = list(a.saliences)
    return out


def serialize_scenario(s: Scenario) -> dict:
    out = {
        "issue_set": serialize_issue_set(s.issue_set),
        "actors": [serialize_actor(a) for a in s.actors],
        "voting_rule": s.voting_rule.value,
        "commitment": s.commitment.value,
        "abstention_enabled": s.abstention_enabled,
        "epsilon_scale": s.epsilon_scale,
    }
    if s.challenge_rates is not None:
        out["challenge_rates"] = [list(r) for r in s.challenge_rates]
    return out
