"""Command-line interface: solve, emit, validate, oracle, bench."""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import sys
from pathlib import Path

from . import oracle as oracle_mod
from . import pddl, plangraph, steplessrun, twothreaded
from .encodings.deletefree import emit_delete_free
from .encodings.layered import (EncodeOptions, emit_layered, variant_one_options,
                                variant_two_options)
from .encodings.stepless import emit_stepless, initial_bag
from .model import (GroundProblem, add_preserving_actions, canonical_partial_order,
                    load_problem, plan_cost, validate_plan)
from .solver import (OPTIMUM, UNSAT, SolveRequest, SolverConfig, SolverError,
                     SolverNotFound, default_solver_command, solve)

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3
EXIT_SOLVER = 4

MODES = ("layered", "two-threaded", "stepless", "delete-free")


class UsageError(Exception):
    pass


def _load_instance(paths: list[str]) -> GroundProblem:
    """One JSON file, or a PDDL domain file followed by a PDDL problem file."""
    if len(paths) == 1:
        path = Path(paths[0])
        if path.suffix != ".json":
            raise UsageError("a single instance argument must be a .json file "
                             "(PDDL needs domain and problem files)")
        return load_problem(path)
    if len(paths) == 2:
        domain = pddl.parse_domain(Path(paths[0]).read_text())
        problem = pddl.parse_problem(Path(paths[1]).read_text())
        return pddl.ground(domain, problem)
    raise UsageError("expected one JSON instance or a PDDL domain/problem pair")


def _solver_config(args) -> SolverConfig:
    import shlex
    command = shlex.split(args.solver_cmd) if args.solver_cmd else default_solver_command()
    return SolverConfig(command=command, keep_files=args.keep_files)


def _emit_output(args, payload: dict):
    if getattr(args, "output", "json") == "json":
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        for key, value in payload.items():
            print("%s: %s" % (key, value))


# ---------------------------------------------------------------------------
# solve

def cmd_solve(args) -> int:
    problem = _load_instance(args.instance)
    cfg = _solver_config(args)
    if args.mode == "two-threaded":
        outcome = twothreaded.run(problem, twothreaded.TwoThreadedConfig(
            global_timeout=args.timeout, solver=cfg, asap=args.asap))
        _emit_output(args, outcome.to_json())
        return {"optimal": EXIT_OK, "no-solution": EXIT_NO_SOLUTION}.get(
            outcome.status, EXIT_INCONCLUSIVE)
    if args.mode == "stepless":
        outcome = steplessrun.run(problem, steplessrun.SteplessConfig(
            global_timeout=args.timeout, solver=cfg,
            artifact_dir=args.artifact_dir))
        _emit_output(args, outcome.to_json())
        return {"optimal": EXIT_OK, "no-solution": EXIT_NO_SOLUTION}.get(
            outcome.status, EXIT_INCONCLUSIVE)
    if args.mode == "layered":
        base = add_preserving_actions(problem)
        graph = plangraph.build(base)
        makespan = args.makespan
        if makespan is None:
            first = plangraph.first_goal_layer(graph)
            if first is plangraph.UNREACHABLE:
                _emit_output(args, {"status": "no-solution",
                                    "reason": "goal unreachable in the planning graph"})
                return EXIT_NO_SOLUTION
            makespan = first
        result = solve(SolveRequest(
            emit_layered(base, graph, makespan, variant_one_options()).text,
            timeout=args.timeout, label="layered"), cfg)
        if result.status == UNSAT:
            _emit_output(args, {"status": "unsat", "makespan": makespan})
            return EXIT_NO_SOLUTION
        if result.status != OPTIMUM:
            _emit_output(args, {"status": result.status, "makespan": makespan})
            return EXIT_INCONCLUSIVE
        plan = twothreaded.decode_layered_plan(result.atoms, base)
        _emit_output(args, {"status": "optimal", "makespan": makespan,
                            "cost": result.cost, "plan": [a.name for a in plan]})
        return EXIT_OK
    # delete-free
    result = solve(SolveRequest(
        emit_delete_free(problem, args.direction).text,
        timeout=args.timeout, label="delete-free"), cfg)
    if result.status == UNSAT:
        _emit_output(args, {"status": "no-solution"})
        return EXIT_NO_SOLUTION
    if result.status != OPTIMUM:
        _emit_output(args, {"status": result.status})
        return EXIT_INCONCLUSIVE
    actions = sorted(a[8:-1] for a in result.atoms if a.startswith("happens("))
    _emit_output(args, {"status": "optimal", "cost": result.cost, "actions": actions})
    return EXIT_OK


# ---------------------------------------------------------------------------
# emit

def cmd_emit(args) -> int:
    problem = _load_instance(args.instance)
    if args.encoding in ("variant1", "variant2"):
        base = add_preserving_actions(problem)
        graph = plangraph.build(base)
        makespan = args.makespan if args.makespan is not None else 0
        opts = (variant_one_options() if args.encoding == "variant1"
                else variant_two_options(asap=args.asap))
        sys.stdout.write(emit_layered(base, graph, makespan, opts).text)
    elif args.encoding in ("delete-free-forward", "delete-free-backward"):
        direction = args.encoding.rsplit("-", 1)[1]
        sys.stdout.write(emit_delete_free(problem, direction).text)
    elif args.encoding == "stepless":
        sys.stdout.write(emit_stepless(problem, initial_bag(problem)).text)
    else:
        raise UsageError("unknown encoding %r" % args.encoding)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate

def _load_plan(problem: GroundProblem, path: str):
    data = json.loads(Path(path).read_text())
    names = data["plan"] if isinstance(data, dict) else data
    by_name = {a.name: a for a in problem.actions}
    missing = [n for n in names if n not in by_name]
    if missing:
        raise UsageError("plan mentions unknown actions: %s" % ", ".join(missing))
    return [by_name[n] for n in names]


def cmd_validate(args) -> int:
    problem = _load_instance([args.instance])
    plan = _load_plan(problem, args.plan)
    report = validate_plan(problem, plan)
    payload = {"valid": report.valid, "cost": report.cost if report.valid else None,
               "failed_step": report.failed_step, "reason": report.reason}
    _emit_output(args, payload)
    return EXIT_OK if report.valid else EXIT_NO_SOLUTION


# ---------------------------------------------------------------------------
# oracle

def cmd_oracle(args) -> int:
    problem = _load_instance([args.problem])
    if args.action == "solve":
        answer = oracle_mod.optimal_cost_search(problem)
        if answer is oracle_mod.NO_SOLUTION:
            _emit_output(args, {"status": "no-solution"})
            return EXIT_NO_SOLUTION
        cost, plan = answer
        _emit_output(args, {"status": "optimal", "cost": cost,
                            "plan": [a.name for a in plan]})
        return EXIT_OK
    if args.action == "dfp":
        answer = oracle_mod.delete_free_optimal(problem)
        if answer is oracle_mod.NO_SOLUTION:
            _emit_output(args, {"status": "no-solution"})
            return EXIT_NO_SOLUTION
        _emit_output(args, {"status": "optimal", "cost": answer})
        return EXIT_OK
    # check-minimal
    if not args.plan:
        raise UsageError("oracle check-minimal needs --plan")
    plan = _load_plan(problem, args.plan)
    pop = canonical_partial_order(problem, plan)
    report = oracle_mod.is_strongly_minimal(problem, pop)
    _emit_output(args, {"strongly_minimal": report.minimal,
                        "witness": [sorted(w) for w in report.witness] if report.witness else None})
    return EXIT_OK if report.minimal else EXIT_NO_SOLUTION


# ---------------------------------------------------------------------------
# bench

BENCH_COLUMNS = ["problem", "C*", "n", "n*", "t_pi", "t_star", "t_2-threaded",
                 "n_s", "t_stepless", "l_s"]


def _bench_instance(name: str, problem: GroundProblem, args, cfg) -> dict:
    row = {c: "-" for c in BENCH_COLUMNS}
    row["problem"] = name
    costs = set()
    if args.mode in ("two-threaded", "all"):
        try:
            outcome = twothreaded.run(problem, twothreaded.TwoThreadedConfig(
                global_timeout=args.timeout, solver=cfg))
            if outcome.status == twothreaded.OPTIMAL:
                costs.add(outcome.cost)
                row["C*"] = outcome.cost
                if outcome.v1_makespan is not None:
                    row["n"] = outcome.v1_makespan
                if outcome.v2_proof_makespan is not None:
                    row["n*"] = outcome.v2_proof_makespan
                t0 = next(e["t"] for e in outcome.events if e["kind"] == "setup")
                uppers = [e["t"] for e in outcome.events
                          if e["kind"] == "upper" and e["cost"] == outcome.cost]
                proofs = [e["t"] for e in outcome.events
                          if e["kind"] in ("lower", "v2-unsat", "v2-no-suffix")]
                if uppers:
                    row["t_pi"] = round(uppers[0] - t0, 1)
                if proofs:
                    row["t_star"] = round(proofs[-1] - t0, 1)
                row["t_2-threaded"] = round(outcome.wall_time, 1)
        except SolverError as exc:
            row["n"] = "error: %s" % exc
    if args.mode in ("stepless", "all"):
        try:
            outcome = steplessrun.run(problem, steplessrun.SteplessConfig(
                global_timeout=args.timeout, solver=cfg))
            if outcome.status == steplessrun.OPTIMAL:
                costs.add(outcome.cost)
                row["C*"] = outcome.cost
                row["n_s"] = len(outcome.iterations)
                row["t_stepless"] = round(outcome.wall_time, 1)
                row["l_s"] = round(outcome.iterations[-1].wall_time, 1)
        except SolverError as exc:
            row["n_s"] = "error: %s" % exc
    if len(costs) > 1:
        row["C*"] = "disagree: %s" % sorted(costs)
    return row


def cmd_bench(args) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        raise UsageError("%s is not a directory" % directory)
    cfg = _solver_config(args)
    instances = []
    for path in sorted(directory.glob("*.json")):
        instances.append((path.stem, load_problem(path)))
    for dom_path in sorted(directory.glob("*-domain.pddl")):
        prob_path = dom_path.with_name(dom_path.name.replace("-domain", "-problem"))
        if prob_path.exists():
            instances.append((dom_path.stem.replace("-domain", ""),
                              _load_instance([str(dom_path), str(prob_path)])))
    if args.jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(
                lambda item: _bench_instance(item[0], item[1], args, cfg), instances))
    else:
        rows = [_bench_instance(name, prob, args, cfg) for name, prob in instances]
    sys.stdout.write(render_report(rows, args.output))
    return EXIT_OK


def render_report(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    # markdown
    lines = ["| " + " | ".join(BENCH_COLUMNS) + " |",
             "|" + "|".join("---" for _ in BENCH_COLUMNS) + "|"]
    for row in rows:
        lines.append("| " + " | ".join(str(row[c]) for c in BENCH_COLUMNS) + " |")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aspcop", description="Cost-optimal STRIPS planning via ASP")
    parser.add_argument("--solver-cmd", default=None,
                        help="solver command line (default: $ASP_SOLVER, clingo, "
                             "or the bundled wasm wrapper)")
    parser.add_argument("--keep-files", action="store_true",
                        help="keep emitted program files")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("instance", nargs="+",
                   help="instance.json, or domain.pddl problem.pddl")
    p.add_argument("--mode", choices=MODES, default="two-threaded")
    p.add_argument("--timeout", type=float, default=300.0)
    p.add_argument("--makespan", type=int, default=None,
                   help="fixed makespan (layered mode only)")
    p.add_argument("--direction", choices=("forward", "backward"), default="forward",
                   help="delete-free encoding direction")
    p.add_argument("--asap", action=argparse.BooleanOptionalAction, default=True,
                   help="as-soon-as-possible rule in the lower-bound encoding")
    p.add_argument("--artifact-dir", default=None,
                   help="keep per-iteration programs and models (stepless mode)")
    p.add_argument("--output", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("emit", help="print an encoding and exit")
    p.add_argument("instance", nargs="+")
    p.add_argument("--encoding", required=True,
                   choices=("variant1", "variant2", "delete-free-forward",
                            "delete-free-backward", "stepless"))
    p.add_argument("--makespan", type=int, default=None)
    p.add_argument("--asap", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("validate", help="validate a sequential plan")
    p.add_argument("instance")
    p.add_argument("plan", help="JSON list of action names (or {\"plan\": [...]})")
    p.add_argument("--output", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", help="exact brute-force reference solvers")
    p.add_argument("action", choices=("solve", "dfp", "check-minimal"))
    p.add_argument("--problem", required=True)
    p.add_argument("--plan", default=None)
    p.add_argument("--output", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="run a directory of instances, print a table")
    p.add_argument("dir")
    p.add_argument("--mode", choices=("two-threaded", "stepless", "all"), default="all")
    p.add_argument("--timeout", type=float, default=300.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", choices=("json", "csv", "md"), default="md")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (pddl.ParseError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (SolverNotFound, SolverError) as exc:
        print("solver error: %s" % exc, file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
