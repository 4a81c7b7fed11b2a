"""Brute-force ground truth for desk-scale verification.

Everything here is deliberately independent of the ASP encodings: plain
search and enumeration over the STRIPS semantics in :mod:`aspcop.model`.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

from .model import GroundAction, GroundProblem, PartialOrderPlan, validate_plan


class StateSpaceTooLarge(Exception):
    pass


class TooLarge(Exception):
    pass


class TooManyCuts(Exception):
    pass


NO_SOLUTION = "no-solution"


def optimal_cost_search(problem: GroundProblem, node_cap: int = 10 ** 6):
    """Uniform-cost search over states; returns (cost, plan) or NO_SOLUTION."""
    actions = sorted(problem.regular_actions, key=lambda a: a.name)
    start = problem.init
    counter = itertools.count()
    frontier = [(0, next(counter), start, [])]
    best: dict[frozenset, int] = {start: 0}
    expanded = 0
    while frontier:
        cost, _, state, plan = heapq.heappop(frontier)
        if cost > best.get(state, cost):
            continue
        if problem.goal <= state:
            return cost, plan
        expanded += 1
        if expanded > node_cap:
            raise StateSpaceTooLarge("exceeded %d expansions" % node_cap)
        for a in actions:
            if a.pre <= state:
                nxt = (state - a.delete) | a.add
                ncost = cost + a.cost
                if ncost < best.get(nxt, ncost + 1):
                    best[nxt] = ncost
                    heapq.heappush(frontier, (ncost, next(counter), nxt, plan + [a]))
    return NO_SOLUTION


def reachable_states(problem: GroundProblem, cap: int = 10 ** 6) -> set[frozenset]:
    seen = {problem.init}
    stack = [problem.init]
    while stack:
        state = stack.pop()
        for a in problem.regular_actions:
            if a.pre <= state:
                nxt = (state - a.delete) | a.add
                if nxt not in seen:
                    if len(seen) >= cap:
                        raise StateSpaceTooLarge("more than %d reachable states" % cap)
                    seen.add(nxt)
                    stack.append(nxt)
    return seen


def optimal_makespan_search(problem: GroundProblem, cap: int = 10 ** 5):
    """Breadth-first search for the shortest sequential plan length, or NO_SOLUTION."""
    from collections import deque
    if problem.goal <= problem.init:
        return 0
    seen = {problem.init}
    queue = deque([(problem.init, 0)])
    while queue:
        state, depth = queue.popleft()
        for a in problem.regular_actions:
            if a.pre <= state:
                nxt = (state - a.delete) | a.add
                if problem.goal <= nxt:
                    return depth + 1
                if nxt not in seen:
                    if len(seen) >= cap:
                        raise StateSpaceTooLarge("BFS cap exceeded")
                    seen.add(nxt)
                    queue.append((nxt, depth + 1))
    return NO_SOLUTION


def _closure(init: frozenset, actions: list[GroundAction]) -> frozenset:
    """Delete-free fixpoint of applicable adds."""
    state = set(init)
    changed = True
    remaining = list(actions)
    while changed:
        changed = False
        for a in list(remaining):
            if a.pre <= state:
                remaining.remove(a)
                if not a.add <= state:
                    state |= a.add
                changed = True
    return frozenset(state)


def delete_free_optimal(problem: GroundProblem, enum_limit: int = 25):
    """Exact minimum action-cost subset achieving the goal with deletes ignored.

    Subset enumeration for small action counts, branch and bound above
    enum_limit (still exact, raises TooLarge past 40 actions).
    """
    actions = sorted(problem.regular_actions, key=lambda a: a.name)
    if problem.goal <= problem.init:
        return 0
    if not problem.goal <= _closure(problem.init, actions):
        return NO_SOLUTION
    n = len(actions)
    if n <= enum_limit:
        best = None
        for mask in range(1 << n):
            subset = [actions[i] for i in range(n) if mask >> i & 1]
            cost = sum(a.cost for a in subset)
            if best is not None and cost >= best:
                continue
            if problem.goal <= _closure(problem.init, subset):
                best = cost
        return best if best is not None else NO_SOLUTION
    if n > 48:
        raise TooLarge("%d actions is too many for exact delete-free optimization" % n)
    # branch and bound over action inclusion, ordered by cost descending
    order = sorted(actions, key=lambda a: -a.cost)
    best = [sum(a.cost for a in order) + 1]

    def rec(i: int, chosen: list[GroundAction], cost: int):
        if cost >= best[0]:
            return
        if problem.goal <= _closure(problem.init, chosen):
            best[0] = cost
            return
        if i == len(order):
            return
        rest = order[i:]
        if not problem.goal <= _closure(problem.init, chosen + rest):
            return
        rec(i + 1, chosen + [order[i]], cost + order[i].cost)
        rec(i + 1, chosen, cost)

    rec(0, [], 0)
    if best[0] > sum(a.cost for a in order):
        return NO_SOLUTION
    return best[0]


def _order_ideals(pop: PartialOrderPlan, cap: int):
    """Enumerate downward-closed occurrence sets (the legal cut s-sides)."""
    n = len(pop.occurrences)
    preds = {i: set() for i in range(n)}
    for a, b in pop.edges:
        preds[b].add(a)
    ideals = []
    for r in range(n + 1):
        for combo in itertools.combinations(range(n), r):
            s = set(combo)
            if all(preds[i] <= s for i in s):
                ideals.append(frozenset(s))
                if len(ideals) > cap:
                    raise TooManyCuts("more than %d cuts" % cap)
    return ideals


def _cut_state(problem: GroundProblem, pop: PartialOrderPlan, ideal: frozenset) -> frozenset:
    """State after executing the ideal's actions in some (any) linear order."""
    n = len(pop.occurrences)
    preds = {i: set() for i in range(n)}
    for a, b in pop.edges:
        preds[b].add(a)
    state = problem.init
    done: set[int] = set()
    remaining = set(ideal)
    while remaining:
        ready = sorted(i for i in remaining if preds[i] & ideal <= done)
        i = ready[0]
        action = pop.occurrences[i][0]
        state = (state - action.delete) | action.add
        done.add(i)
        remaining.remove(i)
    return state


@dataclass(frozen=True)
class MinimalityReport:
    minimal: bool
    witness: tuple[frozenset, frozenset] | None = None  # (x-ideal, y-ideal)


def is_strongly_minimal(problem: GroundProblem, pop: PartialOrderPlan,
                        cut_cap: int = 200000) -> MinimalityReport:
    """Decide strong minimality by enumerating all ordered pairs of cuts.

    A plan fails iff there are cuts x, y such that some occurrence is on the
    t-side of x and the s-side of y while no fluent is true in the y-state
    but false in the x-state.
    """
    ideals = _order_ideals(pop, cut_cap)
    states = {ideal: _cut_state(problem, pop, ideal) for ideal in ideals}
    all_occ = frozenset(range(len(pop.occurrences)))
    for x in ideals:
        for y in ideals:
            straddlers = (all_occ - x) & y
            if not straddlers:
                continue
            if not (states[y] - states[x]):
                return MinimalityReport(False, (x, y))
    return MinimalityReport(True)


def make_progress_check(problem: GroundProblem, plan: list[GroundAction]) -> bool:
    """True iff no later state is a subset of an earlier state along the plan."""
    report = validate_plan(problem, plan)
    if not report.valid:
        raise ValueError("plan does not validate: %s" % report.reason)
    states = [problem.init]
    for a in plan:
        states.append((states[-1] - a.delete) | a.add)
    for j in range(len(states)):
        for k in range(j + 1, len(states)):
            if states[k] <= states[j]:
                return False
    return True


def reduce_to_progress(problem: GroundProblem, plan: list[GroundAction]) -> list[GroundAction]:
    """Remove layer spans that revisit (a superset of) an earlier state.

    Yields a plan making progress with cost and length no greater than the
    input's.
    """
    plan = list(plan)
    while True:
        states = [problem.init]
        for a in plan:
            states.append((states[-1] - a.delete) | a.add)
        found = None
        for j in range(len(states)):
            for k in range(j + 1, len(states)):
                if states[k] <= states[j]:
                    found = (j, k)
                    break
            if found:
                break
        if not found:
            return plan
        j, k = found
        # splice out steps j..k-1; the state at k is a subset of the state at
        # j, so every remaining step stays applicable
        plan = plan[:j] + plan[k:]
