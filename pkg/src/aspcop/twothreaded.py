"""Two-threaded bound-convergence planner.

An upper-bound pipeline (standard cost-minimizing layered solver) and a
lower-bound pipeline (any-goal + make-progress + delete-free suffix) run
concurrently over increasing makespans; a coordinator maintains the bound
ledger and stops both as soon as one of the protocol's stopping predicates
holds.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field

from . import plangraph
from .encodings.layered import EncodeOptions, emit_layered
from .model import GroundAction, GroundProblem, add_preserving_actions, validate_plan
from .solver import (CANCELLED, OPTIMUM, SAT, TIMEOUT, UNSAT, SolveHandle,
                     SolveRequest, SolverConfig, SolverError)
from .terms import split_atom

OPTIMAL = "optimal"
NO_SOLUTION = "no-solution"
INCONCLUSIVE = "inconclusive"

INF = math.inf


class MalformedModel(Exception):
    pass


@dataclass
class TwoThreadedConfig:
    start_makespan: int | None = None    # V-I start; defaults to the first goal layer
    global_timeout: float = 300.0
    # the as-soon-as-possible rule sharpens V-II's per-makespan bounds
    # considerably (and is required for prompt no-solution detection)
    asap: bool = True
    cost_bound: bool = True              # inject best upper bound into V-II
    max_makespan: int = 500
    solver: SolverConfig | None = None
    mutex_style: str = "reduced"


@dataclass
class Outcome:
    status: str
    cost: int | None = None
    plan: list[GroundAction] | None = None
    v1_makespan: int | None = None
    v2_proof_makespan: int | None = None
    wall_time: float = 0.0
    best_upper: int | None = None
    best_lower: int | None = None
    reason: str | None = None
    events: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "cost": self.cost,
            "plan": [a.name for a in self.plan] if self.plan is not None else None,
            "v1_makespan": self.v1_makespan,
            "v2_proof_makespan": self.v2_proof_makespan,
            "wall_time": round(self.wall_time, 3),
            "best_upper": self.best_upper,
            "best_lower": None if self.best_lower in (None, INF) else self.best_lower,
        }


def decode_layered_plan(atoms: list[str], problem: GroundProblem) -> list[GroundAction]:
    """happens/2 atoms -> sequential plan; preserving actions dropped.

    Actions within a layer are ordered by name (the mutex constraints make
    any serialization valid).
    """
    by_name = {a.name: a for a in problem.actions}
    steps: list[tuple[int, str]] = []
    for atom in atoms:
        functor, args = split_atom(atom)
        if functor != "happens":
            continue
        if len(args) != 2:
            raise MalformedModel("bad happens atom %r" % atom)
        try:
            layer = int(args[1])
        except ValueError:
            raise MalformedModel("bad layer in %r" % atom)
        if args[0] not in by_name:
            raise MalformedModel("unknown action %r" % args[0])
        steps.append((layer, args[0]))
    steps.sort()
    return [by_name[name] for _, name in steps if not by_name[name].preserving]


def decode_layer_states(atoms: list[str], makespan: int) -> list[frozenset[str]]:
    """holds/2 atoms -> per-layer fluent sets."""
    states: list[set[str]] = [set() for _ in range(makespan + 1)]
    for atom in atoms:
        functor, args = split_atom(atom)
        if functor == "holds" and len(args) == 2:
            states[int(args[1])].add(args[0])
    return [frozenset(s) for s in states]


class BoundLedger:
    """Thread-safe record of both pipelines' bounds, with an audit trail."""

    def __init__(self):
        self._lock = threading.Lock()
        self.cond = threading.Condition(self._lock)
        self.best_upper: tuple[int, list, int] | None = None  # (cost, plan, makespan)
        self.lower_bounds: dict[int, float] = {}
        self.v1_current: int | None = None
        self.v1_unsat_through: int | None = None
        self.v2_unsat_at: int | None = None
        self.v2_no_suffix: tuple[int, list, int] | None = None
        self.events: list[dict] = []
        self.stop = threading.Event()
        self.error: Exception | None = None

    def log(self, **event):
        event["t"] = time.monotonic()
        self.events.append(event)

    def record_upper(self, cost: int, plan, makespan: int):
        with self.cond:
            if self.best_upper is None or cost < self.best_upper[0]:
                self.best_upper = (cost, plan, makespan)
                self.log(kind="upper", cost=cost, makespan=makespan)
            self.cond.notify_all()

    def record_lower(self, makespan: int, cost: float):
        with self.cond:
            self.lower_bounds[makespan] = cost
            self.log(kind="lower", cost=cost, makespan=makespan)
            self.cond.notify_all()

    def record_v2_unsat(self, makespan: int):
        with self.cond:
            self.v2_unsat_at = makespan
            self.lower_bounds[makespan] = INF
            self.log(kind="v2-unsat", makespan=makespan)
            self.cond.notify_all()

    def record_v1_current(self, makespan: int):
        with self.cond:
            self.v1_current = makespan
            self.log(kind="v1-start", makespan=makespan)
            self.cond.notify_all()

    def record_v1_unsat(self, makespan: int):
        with self.cond:
            self.v1_unsat_through = makespan
            self.log(kind="v1-unsat", makespan=makespan)
            self.cond.notify_all()

    def record_no_suffix(self, cost: int, plan, makespan: int):
        with self.cond:
            self.v2_no_suffix = (cost, plan, makespan)
            self.log(kind="v2-no-suffix", cost=cost, makespan=makespan)
            self.cond.notify_all()

    def lower_bound_upto(self, makespan: int) -> float:
        """Best lower bound among layers <= makespan (bounds carry forward)."""
        if self.v2_unsat_at is not None and makespan >= self.v2_unsat_at:
            return INF
        candidates = [c for k, c in self.lower_bounds.items() if k <= makespan]
        return max(candidates, default=-INF)


def _proven_cost(result) -> int | None:
    """Cost of a solve that ran to a proven conclusion, else None.

    A completed SAT verdict with no optimization values means no weak
    constraint grounded at all (e.g. a zero-makespan program where no action
    can happen), so every model costs 0 and the result is just as proven.
    """
    if result.status == OPTIMUM:
        return result.cost
    if result.status == SAT and result.costs is None:
        return 0
    return None


class _Pipeline(threading.Thread):
    def __init__(self, ledger: BoundLedger):
        super().__init__(daemon=True)
        self.ledger = ledger
        self.handle: SolveHandle | None = None
        self._handle_lock = threading.Lock()

    def launch(self, request: SolveRequest, config) -> object:
        with self._handle_lock:
            if self.ledger.stop.is_set():
                return None
            self.handle = SolveHandle(request, config)
        return self.handle

    def cancel_current(self):
        with self._handle_lock:
            if self.handle is not None:
                self.handle.cancel()

    def run(self):
        try:
            self.work()
        except Exception as exc:  # propagated by the coordinator
            with self.ledger.cond:
                if not self.ledger.stop.is_set():
                    self.ledger.error = exc
                self.ledger.stop.set()
                self.ledger.cond.notify_all()

    def work(self):  # pragma: no cover - overridden
        raise NotImplementedError


def run(problem: GroundProblem, config: TwoThreadedConfig | None = None) -> Outcome:
    """Run the full protocol to an Outcome; problem must be ground."""
    config = config or TwoThreadedConfig()
    t0 = time.monotonic()
    deadline = t0 + config.global_timeout
    base = problem if problem.has_preserving else add_preserving_actions(problem)
    graph = plangraph.build(base)
    first = plangraph.first_goal_layer(graph)
    unreachable = first is plangraph.UNREACHABLE
    v1_start = config.start_makespan if config.start_makespan is not None else (
        0 if unreachable else first)
    solver_cfg = config.solver or SolverConfig()
    ledger = BoundLedger()
    ledger.log(kind="setup", first_goal_layer=None if unreachable else first)

    def remaining() -> float:
        return max(deadline - time.monotonic(), 0.05)

    class V1(_Pipeline):
        def work(self):
            if unreachable:
                # the planning graph proves no makespan admits a plan
                self.ledger.record_v1_unsat(config.max_makespan)
                return
            for k in range(v1_start, config.max_makespan + 1):
                if self.ledger.stop.is_set():
                    return
                self.ledger.record_v1_current(k)
                program = emit_layered(base, graph, k,
                                       EncodeOptions(mutex_style=config.mutex_style))
                handle = self.launch(SolveRequest(program.text, timeout=remaining(),
                                                  label="v1-%d" % k), solver_cfg)
                if handle is None:
                    return
                result = handle.result()
                if result.status in (TIMEOUT, CANCELLED):
                    return
                if result.status == UNSAT:
                    self.ledger.record_v1_unsat(k)
                    continue
                cost = _proven_cost(result)
                if cost is None:
                    raise SolverError("V-I expected an optimum at makespan %d, got %s"
                                      % (k, result.status))
                plan = decode_layered_plan(result.atoms, base)
                report = validate_plan(base, plan)
                if not report.valid or report.cost != cost:
                    raise SolverError("V-I plan failed validation at makespan %d" % k)
                self.ledger.record_upper(cost, plan, k)

    class V2(_Pipeline):
        def work(self):
            for k in range(0, config.max_makespan + 1):
                if self.ledger.stop.is_set():
                    return
                with self.ledger.cond:
                    bound = (self.ledger.best_upper[0]
                             if config.cost_bound and self.ledger.best_upper else None)
                opts = EncodeOptions(any_goal=True, make_progress=True, suffix=True,
                                     asap_rule=config.asap, cost_bound=bound,
                                     mutex_style=config.mutex_style)
                program = emit_layered(base, graph, k, opts)
                handle = self.launch(SolveRequest(program.text, timeout=remaining(),
                                                  label="v2-%d" % k), solver_cfg)
                if handle is None:
                    return
                result = handle.result()
                if result.status in (TIMEOUT, CANCELLED):
                    return
                if result.status == UNSAT:
                    self.ledger.record_v2_unsat(k)
                    return
                cost = _proven_cost(result)
                if cost is None:
                    raise SolverError("V-II expected an optimum at makespan %d, got %s"
                                      % (k, result.status))
                if "useSuffix" not in result.atoms:
                    plan = decode_layered_plan(result.atoms, base)
                    self.ledger.record_no_suffix(cost, plan, k)
                    return
                self.ledger.record_lower(k, cost)

    v1, v2 = V1(ledger), V2(ledger)
    v1.start()
    v2.start()

    outcome: Outcome | None = None
    with ledger.cond:
        while outcome is None:
            if ledger.error is not None:
                break
            outcome = _stopping_outcome(ledger)
            if outcome is not None:
                break
            if time.monotonic() >= deadline:
                lower = ledger.lower_bound_upto(config.max_makespan)
                outcome = Outcome(
                    INCONCLUSIVE,
                    best_upper=ledger.best_upper[0] if ledger.best_upper else None,
                    best_lower=None if lower == -INF else lower,
                    reason="timeout")
                break
            if not v1.is_alive() and not v2.is_alive():
                outcome = Outcome(INCONCLUSIVE, reason="both pipelines exhausted",
                                  best_upper=ledger.best_upper[0] if ledger.best_upper else None)
                break
            ledger.cond.wait(timeout=0.2)
    ledger.stop.set()
    v1.cancel_current()
    v2.cancel_current()
    v1.join(timeout=15)
    v2.join(timeout=15)
    if ledger.error is not None and outcome is None:
        raise ledger.error
    assert outcome is not None
    outcome.wall_time = time.monotonic() - t0
    outcome.events = list(ledger.events)
    return outcome


def _stopping_outcome(ledger: BoundLedger) -> Outcome | None:
    """Evaluate the protocol's stopping predicates against the ledger."""
    if ledger.v2_no_suffix is not None:
        cost, plan, k = ledger.v2_no_suffix
        return Outcome(OPTIMAL, cost, plan, v2_proof_makespan=k,
                       best_upper=cost, best_lower=cost, reason="v2-no-suffix")
    if ledger.best_upper is not None and ledger.v1_current is not None:
        cost, plan, k = ledger.best_upper
        lb = ledger.lower_bound_upto(ledger.v1_current)
        if cost <= lb:
            return Outcome(OPTIMAL, cost, plan, v1_makespan=k,
                           v2_proof_makespan=_proof_layer(ledger, cost),
                           best_upper=cost, best_lower=cost, reason="bounds-met")
    if (ledger.v2_unsat_at is not None and ledger.v1_current is not None
            and ledger.v1_current >= ledger.v2_unsat_at):
        if ledger.best_upper is not None:
            cost, plan, k = ledger.best_upper
            return Outcome(OPTIMAL, cost, plan, v1_makespan=k,
                           v2_proof_makespan=ledger.v2_unsat_at,
                           best_upper=cost, best_lower=cost, reason="v2-horizon-exhausted")
        if (ledger.v1_unsat_through is not None
                and ledger.v1_unsat_through >= ledger.v2_unsat_at - 1):
            return Outcome(NO_SOLUTION, v2_proof_makespan=ledger.v2_unsat_at,
                           reason="v2-unsat-and-v1-exhausted")
    # V-I exhausted the whole horizon proved UNSAT by V-II
    if (ledger.v2_unsat_at is not None and ledger.best_upper is None
            and ledger.v1_unsat_through is not None
            and ledger.v1_unsat_through >= ledger.v2_unsat_at - 1):
        return Outcome(NO_SOLUTION, v2_proof_makespan=ledger.v2_unsat_at,
                       reason="v2-unsat-and-v1-exhausted")
    return None


def _proof_layer(ledger: BoundLedger, cost: int):
    for k in sorted(ledger.lower_bounds):
        if ledger.lower_bounds[k] >= cost:
            return k
    return None


def audit_outcome(outcome: Outcome) -> bool:
    """Replay the event log and confirm the stopping predicate actually held."""
    if outcome.status != OPTIMAL:
        return True
    if outcome.reason == "v2-no-suffix":
        return any(e.get("kind") == "v2-no-suffix" and e.get("cost") == outcome.cost
                   for e in outcome.events)
    if outcome.reason == "bounds-met":
        uppers = [e for e in outcome.events if e.get("kind") == "upper"]
        lowers = [e for e in outcome.events
                  if e.get("kind") in ("lower", "v2-unsat")]
        if not uppers or min(e["cost"] for e in uppers) != outcome.cost:
            return False
        v1_layers = [e["makespan"] for e in outcome.events if e.get("kind") == "v1-start"]
        current = max(v1_layers, default=None)
        if current is None:
            return False
        return any(e["makespan"] <= current and
                   (e["kind"] == "v2-unsat" or e["cost"] >= outcome.cost)
                   for e in lowers)
    if outcome.reason == "v2-horizon-exhausted":
        return any(e.get("kind") == "v2-unsat" for e in outcome.events)
    return False
