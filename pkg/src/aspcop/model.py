"""Propositional STRIPS semantics: problems, states, plans, and basic operations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace


class PlanningError(Exception):
    pass


class InapplicableAction(PlanningError):
    pass


class AlreadyAugmented(PlanningError):
    pass


class InvalidPlan(PlanningError):
    pass


@dataclass(frozen=True)
class GroundAction:
    name: str
    pre: frozenset[str]
    add: frozenset[str]
    delete: frozenset[str]
    cost: int = 1
    preserving: bool = False

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError("action cost must be non-negative: %s" % self.name)

    def __repr__(self):
        return "GroundAction(%s)" % self.name


@dataclass(frozen=True)
class GroundProblem:
    fluents: frozenset[str]
    actions: tuple[GroundAction, ...]
    init: frozenset[str]
    goal: frozenset[str]

    def __post_init__(self):
        if not self.init <= self.fluents:
            raise ValueError("init mentions unknown fluents: %s" % sorted(self.init - self.fluents))
        if not self.goal <= self.fluents:
            raise ValueError("goal mentions unknown fluents: %s" % sorted(self.goal - self.fluents))
        for a in self.actions:
            for part in (a.pre, a.add, a.delete):
                if not part <= self.fluents:
                    raise ValueError("action %s mentions unknown fluents" % a.name)

    def action(self, name: str) -> GroundAction:
        for a in self.actions:
            if a.name == name:
                return a
        raise KeyError(name)

    @property
    def regular_actions(self) -> list[GroundAction]:
        return [a for a in self.actions if not a.preserving]

    @property
    def has_preserving(self) -> bool:
        return any(a.preserving for a in self.actions)


def make_action(name, pre=(), add=(), delete=(), cost=1, preserving=False) -> GroundAction:
    return GroundAction(name, frozenset(pre), frozenset(add), frozenset(delete), cost, preserving)


def make_problem(fluents, actions, init, goal) -> GroundProblem:
    return GroundProblem(frozenset(fluents), tuple(actions), frozenset(init), frozenset(goal))


def problem_from_json(data: dict) -> GroundProblem:
    """Load the native problem format.

    ``{"fluents": [...], "actions": [{"name","pre","add","del","cost"}],
       "init": [...], "goal": [...]}``
    """
    actions = []
    for spec in data["actions"]:
        actions.append(GroundAction(
            spec["name"],
            frozenset(spec.get("pre", ())),
            frozenset(spec.get("add", ())),
            frozenset(spec.get("del", ())),
            int(spec.get("cost", 1)),
        ))
    return make_problem(data["fluents"], actions, data["init"], data["goal"])


def problem_to_json(problem: GroundProblem) -> dict:
    return {
        "fluents": sorted(problem.fluents),
        "actions": [
            {"name": a.name, "pre": sorted(a.pre), "add": sorted(a.add),
             "del": sorted(a.delete), "cost": a.cost}
            for a in problem.actions if not a.preserving
        ],
        "init": sorted(problem.init),
        "goal": sorted(problem.goal),
    }


def load_problem(path) -> GroundProblem:
    with open(path) as fh:
        return problem_from_json(json.load(fh))


def apply(state: frozenset[str], action: GroundAction) -> frozenset[str]:
    """STRIPS successor: (state \\ del) | add; add wins on conflicting effects."""
    missing = action.pre - state
    if missing:
        raise InapplicableAction("%s missing preconditions %s" % (action.name, sorted(missing)))
    return (state - action.delete) | action.add


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    cost: int
    failed_step: int | None = None
    reason: str | None = None


def validate_plan(problem: GroundProblem, plan: list[GroundAction]) -> ValidationReport:
    """Check a sequential plan step by step; failures are reported, not raised."""
    state = problem.init
    cost = 0
    for i, action in enumerate(plan):
        missing = action.pre - state
        if missing:
            return ValidationReport(False, cost, i, "missing preconditions %s" % sorted(missing))
        state = (state - action.delete) | action.add
        if not action.preserving:
            cost += action.cost
    if not problem.goal <= state:
        return ValidationReport(False, cost, len(plan), "goal not satisfied: %s" % sorted(problem.goal - state))
    return ValidationReport(True, cost)


def add_preserving_actions(problem: GroundProblem) -> GroundProblem:
    """Add one no-op preserve(F) per fluent, simulating frame axioms in layered encodings."""
    if problem.has_preserving:
        raise AlreadyAugmented("preserving actions already present")
    extra = tuple(
        GroundAction("preserve(%s)" % f, frozenset([f]), frozenset([f]), frozenset(), 0, True)
        for f in sorted(problem.fluents)
    )
    return replace(problem, actions=problem.actions + extra)


def strip_preserving_actions(problem: GroundProblem) -> GroundProblem:
    return replace(problem, actions=tuple(a for a in problem.actions if not a.preserving))


@dataclass(frozen=True)
class LiftedNegAction:
    """Action that may carry negative preconditions, prior to compilation."""
    name: str
    pre: frozenset[str]
    neg_pre: frozenset[str]
    add: frozenset[str]
    delete: frozenset[str]
    cost: int = 1


def compile_negative_preconditions(fluents, actions: list[LiftedNegAction], init, goal,
                                   neg_goal=()) -> GroundProblem:
    """Compile away negative preconditions/goals with complement fluents.

    For every fluent F referenced negatively a fluent not_F is introduced;
    init contains not_F iff F is not in init, and every add of F deletes
    not_F and vice versa.
    """
    fluents = frozenset(fluents)
    init = frozenset(init)
    negated = frozenset().union(*(a.neg_pre for a in actions)) | frozenset(neg_goal) if actions or neg_goal else frozenset()
    negated = frozenset(negated)
    comp = {f: "not_%s" % f for f in sorted(negated)}
    new_fluents = fluents | frozenset(comp.values())
    new_init = init | frozenset(comp[f] for f in comp if f not in init)
    compiled = []
    for a in actions:
        add = set(a.add)
        delete = set(a.delete)
        for f in comp:
            if f in a.add:
                delete.add(comp[f])
            if f in a.delete:
                add.add(comp[f])
        pre = set(a.pre) | {comp[f] for f in a.neg_pre}
        compiled.append(GroundAction(a.name, frozenset(pre), frozenset(add), frozenset(delete), a.cost))
    new_goal = frozenset(goal) | frozenset(comp[f] for f in neg_goal)
    return GroundProblem(new_fluents, tuple(compiled), new_init, new_goal)


@dataclass(frozen=True)
class PartialOrderPlan:
    """Transitive DAG over action occurrences; occurrences are (action, index) pairs."""
    occurrences: tuple[tuple[GroundAction, int], ...]
    edges: frozenset[tuple[int, int]]  # positions into occurrences

    def __post_init__(self):
        order = self.topological_orders(limit=1)
        if not order:
            raise ValueError("partial order plan contains a cycle")

    def successors(self, i: int) -> set[int]:
        return {b for (a, b) in self.edges if a == i}

    def topological_orders(self, limit: int | None = None) -> list[tuple[int, ...]]:
        """Enumerate topological orders (up to limit); used by small-scale checkers."""
        n = len(self.occurrences)
        preds = {i: set() for i in range(n)}
        for a, b in self.edges:
            preds[b].add(a)
        out: list[tuple[int, ...]] = []

        def rec(chosen: list[int], remaining: set[int]):
            if limit is not None and len(out) >= limit:
                return
            if not remaining:
                out.append(tuple(chosen))
                return
            for i in sorted(remaining):
                if preds[i] <= set(chosen):
                    chosen.append(i)
                    rec(chosen, remaining - {i})
                    chosen.pop()

        rec([], set(range(n)))
        return out

    def topological_plan(self) -> list[GroundAction]:
        """One deterministic topological sort (by action name, then occurrence index)."""
        n = len(self.occurrences)
        preds = {i: set() for i in range(n)}
        for a, b in self.edges:
            preds[b].add(a)
        done: list[int] = []
        remaining = set(range(n))
        while remaining:
            ready = [i for i in remaining if preds[i] <= set(done)]
            ready.sort(key=lambda i: (self.occurrences[i][0].name, self.occurrences[i][1]))
            i = ready[0]
            done.append(i)
            remaining.remove(i)
        return [self.occurrences[i][0] for i in done]


def canonical_partial_order(problem: GroundProblem, plan: list[GroundAction]) -> PartialOrderPlan:
    """Canonical partial order of a valid sequential plan.

    Edges between earlier occurrence a and later occurrence b when: a adds a
    precondition of b; b deletes a precondition of a; a adds what b deletes;
    a deletes what b adds; or both are occurrences of the same action.  The
    result is closed under transitivity.
    """
    report = validate_plan(problem, plan)
    if not report.valid:
        raise InvalidPlan("plan does not validate: %s" % report.reason)
    counts: dict[str, int] = {}
    occurrences = []
    for a in plan:
        counts[a.name] = counts.get(a.name, 0) + 1
        occurrences.append((a, counts[a.name]))
    n = len(plan)
    edges: set[tuple[int, int]] = set()
    for i in range(n):
        for j in range(i + 1, n):
            a, b = plan[i], plan[j]
            if (a.add & b.pre or b.delete & a.pre or a.add & b.delete
                    or a.delete & b.add or a.name == b.name):
                edges.add((i, j))
    # transitive closure (edges only ever go forward, so one forward sweep per pair suffices)
    changed = True
    while changed:
        changed = False
        for i, j in list(edges):
            for j2 in [b for (a, b) in edges if a == j]:
                if (i, j2) not in edges:
                    edges.add((i, j2))
                    changed = True
    return PartialOrderPlan(tuple(occurrences), frozenset(edges))


def plan_cost(plan: list[GroundAction]) -> int:
    return sum(a.cost for a in plan if not a.preserving)
