"""Iterated stepless planning: solve, harvest saturated items, grow the bag.

Each round solves the current occurrence-bag program to a proven optimum.
If the optimal model needs no delete-free suffix, its event graph is
topologically sorted into a plan; otherwise every saturated fluent and
action gains one occurrence and the loop repeats.  Per-round optima are
cost lower bounds for the overall problem, and they never decrease.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

from .encodings.stepless import (OccurrenceBag, SteplessModel, decode_stepless,
                                 emit_stepless, event_graph, initial_bag)
from .model import GroundAction, GroundProblem, validate_plan
from .solver import (CANCELLED, OPTIMUM, SAT, TIMEOUT, UNSAT, SolveRequest,
                     SolverConfig, SolverError, solve)

OPTIMAL = "optimal"
NO_SOLUTION = "no-solution"
INCONCLUSIVE = "inconclusive"


class SaturationMismatch(Exception):
    pass


class EmptyExpansion(Exception):
    pass


class CycleDetected(Exception):
    pass


@dataclass
class SteplessConfig:
    global_timeout: float = 600.0
    max_iterations: int = 200
    solver: SolverConfig | None = None
    # unsatisfiable-core optimization converges much faster than
    # branch-and-bound on the saturation-heavy disjunctive program
    extra_args: list[str] = field(default_factory=lambda: ["--opt-strategy=usc"])
    artifact_dir: str | None = None   # keep per-round programs and models here


@dataclass
class Iteration:
    number: int
    bag_size: int
    cost: int
    use_suffix: bool
    added_fluents: frozenset[str]
    added_actions: frozenset[str]
    wall_time: float

    def to_json(self) -> dict:
        return {
            "number": self.number,
            "bag_size": self.bag_size,
            "cost": self.cost,
            "use_suffix": self.use_suffix,
            "added_fluents": sorted(self.added_fluents),
            "added_actions": sorted(self.added_actions),
            "wall_time": round(self.wall_time, 3),
        }


@dataclass
class SteplessOutcome:
    status: str
    cost: int | None = None
    plan: list[GroundAction] | None = None
    model: SteplessModel | None = None
    iterations: list[Iteration] = field(default_factory=list)
    wall_time: float = 0.0
    reason: str | None = None

    @property
    def lower_bounds(self) -> list[int]:
        return [it.cost for it in self.iterations]

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "cost": self.cost,
            "plan": [a.name for a in self.plan] if self.plan is not None else None,
            "iterations": [it.to_json() for it in self.iterations],
            "wall_time": round(self.wall_time, 3),
        }


def extract_saturated(model: SteplessModel, bag: OccurrenceBag):
    """Saturated fluents/actions, re-derived from the model's own atoms.

    A fluent is saturated when every bagged occurrence (index > 0) is held;
    an action when every bagged occurrence happens.  The re-derivation must
    agree with the solver's saturated/1 atoms.
    """
    fluents = frozenset(
        f for f, count in bag.fluent_count.items()
        if all((f, m) in model.holds for m in range(1, count + 1)))
    actions = frozenset(
        a for a, count in bag.action_count.items()
        if all((a, n) in model.happens for n in range(1, count + 1)))
    if fluents != model.saturated_fluents or actions != model.saturated_actions:
        raise SaturationMismatch(
            "re-derived saturated sets disagree with the model: "
            "fluents %s vs %s, actions %s vs %s"
            % (sorted(fluents), sorted(model.saturated_fluents),
               sorted(actions), sorted(model.saturated_actions)))
    return fluents, actions


def expand_bag(bag: OccurrenceBag, fluents: frozenset[str],
               actions: frozenset[str]) -> OccurrenceBag:
    """One extra occurrence for each saturated item."""
    if not fluents and not actions:
        raise EmptyExpansion("a suffix-using optimum must saturate something")
    fc = dict(bag.fluent_count)
    ac = dict(bag.action_count)
    for f in fluents:
        fc[f] += 1
    for a in actions:
        ac[a] += 1
    return OccurrenceBag(fc, ac, bag.init)


def topo_sort_plan(model: SteplessModel, problem: GroundProblem) -> list[GroundAction]:
    """Serialize the event graph's action vertices into a plan.

    Deterministic: among ready vertices the lexicographically least is
    processed first.  Raises CycleDetected when the graph is not a DAG.
    """
    vertices, edges = event_graph(model)
    indeg = {v: 0 for v in vertices}
    succ: dict = {v: [] for v in vertices}
    for a, b in edges:
        indeg[b] += 1
        succ[a].append(b)

    def key(v):
        kind = v[0]
        payload = v[1]
        return (str(kind), str(payload[0]), payload[1] if isinstance(payload[1], int) else 0)

    import heapq
    ready = [(key(v), v) for v in vertices if indeg[v] == 0]
    heapq.heapify(ready)
    by_name = {a.name: a for a in problem.actions}
    order: list[GroundAction] = []
    seen = 0
    while ready:
        _, v = heapq.heappop(ready)
        seen += 1
        if v[0] == "act":
            order.append(by_name[v[1][0]])
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(ready, (key(w), w))
    if seen != len(vertices):
        raise CycleDetected("event graph has a cycle among %d vertices"
                            % (len(vertices) - seen))
    return order


def run(problem: GroundProblem, config: SteplessConfig | None = None) -> SteplessOutcome:
    """Run the grow-the-bag loop until a suffix-free optimum or UNSAT."""
    config = config or SteplessConfig()
    solver_cfg = config.solver or SolverConfig()
    t0 = time.monotonic()
    deadline = t0 + config.global_timeout
    bag = initial_bag(problem)
    iterations: list[Iteration] = []

    for number in range(1, config.max_iterations + 1):
        budget = deadline - time.monotonic()
        if budget <= 0:
            return _inconclusive(iterations, t0, "timeout")
        program = emit_stepless(problem, bag)
        if config.artifact_dir:
            os.makedirs(config.artifact_dir, exist_ok=True)
            with open(os.path.join(config.artifact_dir, "round-%02d.lp" % number), "w") as fh:
                fh.write(program.text)
        it_start = time.monotonic()
        result = solve(SolveRequest(program.text, extra_args=list(config.extra_args),
                                    timeout=budget, label="stepless-%d" % number),
                       solver_cfg)
        it_wall = time.monotonic() - it_start
        if result.status in (TIMEOUT, CANCELLED):
            return _inconclusive(iterations, t0, "timeout")
        if result.status == UNSAT:
            # Suffix-free models of a smaller bag remain models of every
            # larger bag, so UNSAT at any round means no plan fits the bag
            # outright and no suffix-using model can justify growing it
            # further: the problem has no solution.
            return SteplessOutcome(NO_SOLUTION, iterations=iterations,
                                   wall_time=time.monotonic() - t0,
                                   reason="round-%d-unsat" % number)
        if result.status == OPTIMUM:
            cost = result.cost or 0
        elif result.status == SAT and result.costs is None:
            # a completed enumeration with no ground optimization statement:
            # every model costs 0, so the verdict is just as proven
            cost = 0
        else:
            raise SolverError("stepless round %d needs a proven optimum, got %s"
                              % (number, result.status))
        model = decode_stepless(result.atoms, cost=cost)
        if iterations and model.cost < iterations[-1].cost:
            raise SolverError("per-round optima regressed: %d after %d"
                              % (model.cost, iterations[-1].cost))
        if config.artifact_dir:
            with open(os.path.join(config.artifact_dir, "round-%02d.json" % number), "w") as fh:
                json.dump(model.to_json(), fh, indent=2)
        if not model.use_suffix:
            iterations.append(Iteration(number, bag.size(), model.cost, False,
                                        frozenset(), frozenset(), it_wall))
            plan = topo_sort_plan(model, problem)
            report = validate_plan(problem, plan)
            if not report.valid or report.cost != model.cost:
                raise SolverError("serialized stepless plan failed validation: %s"
                                  % report.reason)
            return SteplessOutcome(OPTIMAL, model.cost, plan, model, iterations,
                                   time.monotonic() - t0, "no-suffix-optimum")
        fluents, actions = extract_saturated(model, bag)
        iterations.append(Iteration(number, bag.size(), model.cost, True,
                                    fluents, actions, it_wall))
        bag = expand_bag(bag, fluents, actions)
    return _inconclusive(iterations, t0, "iteration-cap")


def _inconclusive(iterations, t0, reason) -> SteplessOutcome:
    return SteplessOutcome(INCONCLUSIVE, iterations=iterations,
                           wall_time=time.monotonic() - t0, reason=reason)
