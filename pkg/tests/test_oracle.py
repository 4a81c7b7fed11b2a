import json
import random

import pytest

from aspcop import oracle
from aspcop.model import (canonical_partial_order, make_action, make_problem,
                          validate_plan)
from conftest import FIXTURES, random_problem

DERIVED = json.loads((FIXTURES / "derived.json").read_text())


def test_bridge4_frozen_optimum(bridge4):
    cost, plan = oracle.optimal_cost_search(bridge4)
    assert cost == DERIVED["bridge4_optimal_cost"] == 17
    assert validate_plan(bridge4, plan).valid


def test_bridge6_frozen_optimum(bridge6):
    cost, plan = oracle.optimal_cost_search(bridge6)
    assert cost == DERIVED["bridge6_optimal_cost"] == 37
    assert len(plan) == DERIVED["bridge6_min_plan_length"]


def test_no_solution():
    a = make_action("a", pre=["p"], add=["q"])
    problem = make_problem(["p", "q", "r"], [a], ["p"], ["r"])
    assert oracle.optimal_cost_search(problem) is oracle.NO_SOLUTION
    assert oracle.optimal_makespan_search(problem) is oracle.NO_SOLUTION


def test_goal_in_init_is_free():
    problem = make_problem(["p"], [], ["p"], ["p"])
    assert oracle.optimal_cost_search(problem) == (0, [])
    assert oracle.optimal_makespan_search(problem) == 0


def test_zero_cost_actions():
    a = make_action("a", add=["p"], cost=0)
    b = make_action("b", pre=["p"], add=["q"], cost=3)
    problem = make_problem(["p", "q"], [a, b], [], ["q"])
    cost, plan = oracle.optimal_cost_search(problem)
    assert cost == 3 and len(plan) == 2


def test_reachable_states_switch():
    flip = make_action("flip", pre=["off"], add=["on"], delete=["off"])
    flop = make_action("flop", pre=["on"], add=["off"], delete=["on"])
    problem = make_problem(["on", "off"], [flip, flop], ["off"], ["on"])
    assert len(oracle.reachable_states(problem)) == 2


def test_delete_free_enumeration_matches_bnb():
    rng = random.Random(7)
    for _ in range(25):
        problem = random_problem(rng)
        enum = oracle.delete_free_optimal(problem, enum_limit=len(problem.actions))
        bnb = oracle.delete_free_optimal(problem, enum_limit=0)
        assert enum == bnb


def test_delete_free_bridge6_frozen(bridge6):
    assert oracle.delete_free_optimal(bridge6) == DERIVED["bridge6_delete_free_cost"] == 27


def test_delete_free_lower_bound():
    rng = random.Random(11)
    for _ in range(30):
        problem = random_problem(rng)
        full = oracle.optimal_cost_search(problem)
        relaxed = oracle.delete_free_optimal(problem)
        if full is oracle.NO_SOLUTION:
            continue
        assert relaxed is not oracle.NO_SOLUTION
        assert relaxed <= full[0]


def goalless(problem):
    return make_problem(problem.fluents, problem.actions, problem.init, [])


def test_strong_minimality_cost31_prefix_rejected(bridge6):
    # Joe crossing and returning before the productive pair makes no progress:
    # the start cut and the cut after his return bound an empty-progress span
    plan31 = [
        bridge6.action("cross_alone(joe,side_a,side_b)"),
        bridge6.action("cross_alone(joe,side_b,side_a)"),
        bridge6.action("cross_together(jack,joe,side_a,side_b)"),
        bridge6.action("cross_alone(joe,side_b,side_a)"),
    ]
    pop = canonical_partial_order(goalless(bridge6), plan31)
    report = oracle.is_strongly_minimal(bridge6, pop)
    assert not report.minimal
    x, y = report.witness
    # the witness straddles at least one occurrence and shows no new fluent
    assert (frozenset(range(len(pop.occurrences))) - x) & y
    state_x = oracle._cut_state(bridge6, pop, x)
    state_y = oracle._cut_state(bridge6, pop, y)
    assert not (state_y - state_x)


def test_strong_minimality_cost29_prefix_accepted(bridge6):
    plan29 = [
        bridge6.action("cross_together(jack,joe,side_a,side_b)"),
        bridge6.action("cross_alone(joe,side_b,side_a)"),
    ]
    pop = canonical_partial_order(goalless(bridge6), plan29)
    assert oracle.is_strongly_minimal(bridge6, pop).minimal


def test_switch_flipped_twice_rejected():
    flip = make_action("flip", pre=["off"], add=["on"], delete=["off"])
    flop = make_action("flop", pre=["on"], add=["off"], delete=["on"])
    problem = make_problem(["on", "off"], [flip, flop], ["off"], [])
    pop = canonical_partial_order(problem, [flip, flop])
    # off -> on -> off revisits the initial state
    report = oracle.is_strongly_minimal(problem, pop)
    assert not report.minimal


def test_make_progress_check():
    flip = make_action("flip", pre=["off"], add=["on"], delete=["off"])
    flop = make_action("flop", pre=["on"], add=["off"], delete=["on"])
    problem = make_problem(["on", "off"], [flip, flop], ["off"], [])
    assert oracle.make_progress_check(problem, [flip])
    assert not oracle.make_progress_check(problem, [flip, flop])


def test_reduce_to_progress_lemma():
    rng = random.Random(23)
    checked = 0
    for _ in range(60):
        problem = random_problem(rng)
        answer = oracle.optimal_cost_search(problem)
        if answer is oracle.NO_SOLUTION:
            continue
        _, plan = answer
        # pad the plan with a wasteful loop when one exists
        padded = None
        for a in problem.regular_actions:
            for b in problem.regular_actions:
                trial = [a, b] + plan
                if validate_plan(problem, trial).valid and not \
                        oracle.make_progress_check(problem, trial):
                    padded = trial
                    break
            if padded:
                break
        for candidate in filter(None, [plan, padded]):
            reduced = oracle.reduce_to_progress(problem, candidate)
            assert validate_plan(problem, reduced).valid
            assert oracle.make_progress_check(problem, reduced)
            assert sum(a.cost for a in reduced) <= sum(a.cost for a in candidate)
            assert len(reduced) <= len(candidate)
            checked += 1
    assert checked >= 20


def test_cut_state_serialization_independent(bridge6):
    plan = [
        bridge6.action("cross_together(jack,joe,side_a,side_b)"),
        bridge6.action("cross_alone(joe,side_b,side_a)"),
        bridge6.action("cross_together(candice,averell,side_a,side_b)"),
    ]
    pop = canonical_partial_order(goalless(bridge6), plan)
    for ideal in oracle._order_ideals(pop, 1000):
        state = oracle._cut_state(bridge6, pop, ideal)
        # replay every serialization of the ideal and compare end states
        sub = sorted(ideal)
        import itertools
        for perm in itertools.permutations(sub):
            ok = True
            s = bridge6.init
            preds = {b: {a for (a, b2) in pop.edges if b2 == b} for b in range(len(pop.occurrences))}
            seen = set()
            for i in perm:
                if not preds[i] & ideal <= seen:
                    ok = False
                    break
                act = pop.occurrences[i][0]
                s = (s - act.delete) | act.add
                seen.add(i)
            if ok:
                assert s == state
