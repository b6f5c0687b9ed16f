"""Batch command line: solve, sweep, parliament, optimize, oracle.

Reads one JSON scenario file, writes one report (JSON or RFC-4180 CSV).
Exit codes: 0 success, 1 bad input, 2 solver did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .coalitions import victory_matrix
from .generators import (
    build_parliament_scenario,
    government_issue_forecast,
    government_utility_table,
)
from .markov import (
    DEFAULT_MAX_ITERS,
    DEFAULT_TOLERANCE,
    limiting_distribution,
    monte_carlo_oracle,
)
from .model import NpceError, Scenario, validate_scenario
from .voting import condorcet_classify
from .schema import (
    ScenarioFile,
    SchemaError,
    parse_scenario_data,
    parse_scenario_file,
    serialize_scenario,
)
from .strategy import (
    apply_strategy,
    classify_robustness,
    expected_utility,
    optimize_strategy,
    outcome_risk_rms,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_CONVERGENCE = 2


class InputError(Exception):
    pass


class ConvergenceError(Exception):
    pass


def _load(path: str) -> ScenarioFile:
    try:
        return parse_scenario_file(path)
    except FileNotFoundError:
        raise InputError(f"input file not found: {path}") from None
    except SchemaError as exc:
        raise InputError(str(exc)) from None


def _checked_scenario(sf: ScenarioFile) -> Scenario:
    if sf.scenario is None:
        raise InputError("this command needs a 'scenario' section")
    violations = validate_scenario(sf.scenario)
    if violations:
        lines = "; ".join(f"scenario.{v.path}: {v.message}" for v in violations)
        raise InputError(f"invalid scenario: {lines}")
    return sf.scenario


def _forecast(P: np.ndarray, rates, tolerance: float, max_iters: int):
    p, diag = limiting_distribution(P, rates, tolerance=tolerance, max_iters=max_iters)
    if not diag.converged:
        raise ConvergenceError(
            f"no convergence after {diag.iterations} iterations "
            f"(residual {diag.final_residual:.3e})"
        )
    return p, diag


def _report(command: str, args, sf: ScenarioFile, results: dict) -> dict:
    return {
        "tool": "npce",
        "version": __version__,
        "command": command,
        "seed": args.seed,
        "tolerance": args.tolerance,
        "max_iters": args.max_iters,
        "input": sf.raw,
        "results": results,
    }


def _victory_inputs(sf: ScenarioFile, args):
    """P matrix, challenge rates, and option labels from either input mode."""
    if sf.p_matrix is not None:
        n = sf.p_matrix.shape[0]
        return sf.p_matrix, None, [str(i) for i in range(n)]
    scenario = _checked_scenario(sf)
    P = victory_matrix(scenario).probabilities
    rates = None if scenario.challenge_rates is None else np.asarray(scenario.challenge_rates)
    labels = [scenario.issue_set.label(a.position) for a in scenario.actors]
    return P, rates, labels


def _actor_outcomes(scenario: Scenario, p) -> dict:
    """Expected utility and RMS risk per actor over the held positions."""
    options = [a.position for a in scenario.actors]
    out = {}
    for a in scenario.actors:
        out[a.id] = {
            "expected_utility": expected_utility(a, p, scenario.issue_set, options),
            "risk_rms": outcome_risk_rms(a, p, scenario.issue_set, options),
        }
    return out


def cmd_solve(args) -> dict:
    sf = _load(args.input)
    P, rates, labels = _victory_inputs(sf, args)
    p, diag = _forecast(P, rates, args.tolerance, args.max_iters)
    report = classify_robustness(P, p)
    results = {
        "labels": labels,
        "victory_matrix": P.tolist(),
        "distribution": p.tolist(),
        "iterations": diag.iterations,
        "residual": diag.final_residual,
        "winner": {
            "option": report.winner,
            "margin": report.margin,
            "label": report.label,
            "probability_gap": report.probability_gap,
        },
    }
    if sf.scenario is not None:
        scenario = sf.scenario
        cls = condorcet_classify(
            scenario.voting_rule, scenario.actors,
            [a.position for a in scenario.actors], scenario.issue_set,
        )
        results["condorcet"] = {
            "kind": cls.kind,
            "winner": cls.winner,
            "winners": list(cls.winners),
            "margins": list(cls.margins),
        }
        results["actors"] = _actor_outcomes(scenario, p)
    return _report("solve", args, sf, results)


def _set_path(obj, path: str, value) -> None:
    parts = path.split(".")
    for i, part in enumerate(parts):
        key = int(part) if isinstance(obj, list) else part
        try:
            if i == len(parts) - 1:
                obj[key]  # must already exist; sweeps never invent fields
                obj[key] = value
            else:
                obj = obj[key]
        except (KeyError, IndexError, ValueError, TypeError):
            raise InputError(f"sweep parameter path not found: {path}") from None


def cmd_sweep(args) -> dict:
    sf = _load(args.input)
    if sf.sweep is None:
        raise InputError("sweep command needs a 'sweep' section")
    base = _checked_scenario(sf)
    sweep = sf.sweep
    values = np.linspace(sweep.lo, sweep.hi, sweep.steps)
    rows = []
    for v in values:
        data = serialize_scenario(base)
        _set_path(data, sweep.parameter, float(v))
        try:
            scenario = parse_scenario_data({"schema_version": "1", "scenario": data}).scenario
        except SchemaError as exc:
            raise InputError(f"sweep value {v} rejected: {exc}") from None
        P = victory_matrix(scenario).probabilities
        rates = None if scenario.challenge_rates is None else np.asarray(scenario.challenge_rates)
        p, diag = _forecast(P, rates, args.tolerance, args.max_iters)
        rows.append({
            "value": float(v),
            "distribution": p.tolist(),
            "expected_utilities": {
                a: d["expected_utility"] for a, d in _actor_outcomes(scenario, p).items()
            },
            "winner_label": classify_robustness(P, p).label,
            "iterations": diag.iterations,
        })
    labels = [base.issue_set.label(a.position) for a in base.actors]
    return _report("sweep", args, sf, {
        "parameter": sweep.parameter,
        "labels": labels,
        "rows": rows,
    })


def cmd_parliament(args) -> dict:
    sf = _load(args.input)
    if sf.parliament is None:
        raise InputError("parliament command needs a 'parliament' section")
    spec = sf.parliament
    table = government_utility_table(spec)
    scenario = build_parliament_scenario(spec)
    P = victory_matrix(scenario).probabilities
    p, diag = _forecast(P, None, args.tolerance, args.max_iters)
    space = spec.government_space
    # Chain states are the governments the evaluators stand behind; other
    # governments never hold power and get probability zero.
    prob_by_gov: dict[int, float] = {}
    for actor, prob in zip(scenario.actors, p):
        prob_by_gov[actor.position] = prob_by_gov.get(actor.position, 0.0) + float(prob)
    governments = []
    for gov in range(space.option_count):
        governments.append({
            "members": [spec.parties[m].id for m in space.members(gov)],
            "probability": prob_by_gov.get(gov, 0.0),
            "utilities": {e.id: table[e.id][gov] for e in spec.evaluators},
        })
    governments.sort(key=lambda g: g["probability"], reverse=True)
    # Nested per-issue forecasts for the most probable government.
    modal = max(prob_by_gov, key=prob_by_gov.get) if prob_by_gov else 0
    issues = []
    for s in range(len(spec.issues)):
        coords, dist = government_issue_forecast(spec, modal, s)
        issues.append({
            "issue": s,
            "coordinates": coords,
            "distribution": dist.tolist(),
        })
    return _report("parliament", args, sf, {
        "governments": governments,
        "modal_government": [spec.parties[m].id for m in space.members(modal)],
        "modal_issue_forecasts": issues,
        "iterations": diag.iterations,
        "residual": diag.final_residual,
    })


def cmd_optimize(args) -> dict:
    sf = _load(args.input)
    if sf.strategy is None:
        raise InputError("optimize command needs a 'strategy' section")
    scenario = _checked_scenario(sf)
    spec = sf.strategy
    result = optimize_strategy(
        scenario, spec.strategist, spec.dimensions, spec.budget,
        iters=spec.iters, h=spec.h,
    )

    def risk_of(sc: Scenario) -> float:
        P = victory_matrix(sc).probabilities
        rates = None if sc.challenge_rates is None else np.asarray(sc.challenge_rates)
        p, _ = _forecast(P, rates, args.tolerance, args.max_iters)
        options = [a.position for a in sc.actors]
        return outcome_risk_rms(sc.actor_by_id(spec.strategist), p, sc.issue_set, options)

    return _report("optimize", args, sf, {
        "risk_baseline": risk_of(scenario),
        "risk_achieved": risk_of(apply_strategy(scenario, result.strategy)),
        "strategist": spec.strategist,
        "baseline": result.baseline,
        "achieved": result.achieved,
        "gain": result.achieved - result.baseline,
        "iterations": result.iterations,
        "deltas": {
            d.actor_id: float(x)
            for d, x in zip(result.strategy.dimensions, result.strategy.deltas)
        },
        "spent": result.strategy.spent(),
        "budget": spec.budget,
        "trace": list(result.trace),
    })


def cmd_oracle(args) -> dict:
    sf = _load(args.input)
    P, rates, labels = _victory_inputs(sf, args)
    p, diag = _forecast(P, rates, args.tolerance, args.max_iters)
    mc = monte_carlo_oracle(
        P, rates, steps=args.steps, replications=args.replications, seed=args.seed
    )
    return _report("oracle", args, sf, {
        "labels": labels,
        "solver_distribution": p.tolist(),
        "oracle_distribution": mc.distribution.tolist(),
        "standard_errors": mc.standard_errors.tolist(),
        "max_abs_difference": float(np.max(np.abs(p - mc.distribution))),
        "steps": mc.steps,
        "replications": mc.replications,
    })


# ---------------------------------------------------------------------------
# Output formatting


def _num(x: float) -> str:
    return f"{x:.17g}"


def _csv_rows(report: dict):
    """Flatten the command-specific results into one tabular block."""
    r = report["results"]
    command = report["command"]
    if command in ("solve", "oracle"):
        key = "distribution" if command == "solve" else "oracle_distribution"
        yield ["option", "probability"]
        for label, prob in zip(r["labels"], r[key]):
            yield [label, _num(prob)]
    elif command == "sweep":
        actor_ids = list(r["rows"][0]["expected_utilities"]) if r["rows"] else []
        yield (["value"] + [f"p[{label}]" for label in r["labels"]]
               + [f"eu[{a}]" for a in actor_ids] + ["winner_label"])
        for row in r["rows"]:
            yield ([_num(row["value"])] + [_num(x) for x in row["distribution"]]
                   + [_num(row["expected_utilities"][a]) for a in actor_ids]
                   + [row["winner_label"]])
    elif command == "parliament":
        yield ["members", "probability"]
        for g in r["governments"]:
            yield ["+".join(g["members"]), _num(g["probability"])]
    else:
        yield ["dimension", "delta"]
        for actor_id, delta in r["deltas"].items():
            yield [actor_id, _num(delta)]


def _emit(report: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)  # RFC-4180 line endings by default
        writer.writerows(_csv_rows(report))
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npce",
        description="Probabilistic contest forecasts from JSON scenario files.",
    )
    parser.add_argument("--version", action="version", version=f"npce {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True, help="JSON scenario file")
        p.add_argument("--output", default=None, help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
        p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)

    for name, fn, doc in (
        ("solve", cmd_solve, "forecast the limiting distribution of one scenario"),
        ("sweep", cmd_sweep, "re-solve across a swept scenario parameter"),
        ("parliament", cmd_parliament, "two-stage government-formation forecast"),
        ("optimize", cmd_optimize, "budgeted capability-allocation strategy search"),
        ("oracle", cmd_oracle, "cross-check the solver against direct simulation"),
    ):
        p = sub.add_parser(name, help=doc)
        common(p)
        if name == "oracle":
            p.add_argument("--steps", type=int, default=5000)
            p.add_argument("--replications", type=int, default=100)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.tolerance <= 0 or args.max_iters < 1:
        print("npce: tolerance must be > 0 and max-iters >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = args.fn(args)
    except (InputError, NpceError) as exc:
        print(f"npce: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"npce: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    _emit(report, args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
