import random

import pytest

from aspcop import plangraph
from aspcop.encodings.layered import (EncodeOptions, InvalidOptions,
                                      emit_layered, variant_one_options,
                                      variant_two_options)
from aspcop.model import add_preserving_actions, make_action, make_problem
from aspcop.solver import OPTIMUM, SAT, UNSAT, SolveRequest, solve
from conftest import random_problem


def layered_solve(problem, makespan, solver_config, opts=None):
    aug = add_preserving_actions(problem)
    graph = plangraph.build(aug)
    program = emit_layered(aug, graph, makespan, opts or EncodeOptions())
    return solve(SolveRequest(program.text, label="m%d" % makespan), solver_config)


def test_option_invariants():
    with pytest.raises(InvalidOptions):
        EncodeOptions(mutex_style="bogus").check()
    with pytest.raises(InvalidOptions):
        EncodeOptions(asap_rule=True).check()
    with pytest.raises(InvalidOptions):
        EncodeOptions(make_progress=True).check()
    with pytest.raises(InvalidOptions):
        EncodeOptions(suffix=True).check()
    variant_one_options().check()
    variant_two_options(cost_bound=10, asap=True).check()


def test_requires_preserving_and_nonnegative_makespan(bridge6):
    graph = plangraph.build(add_preserving_actions(bridge6))
    with pytest.raises(InvalidOptions):
        emit_layered(bridge6, graph, 1, EncodeOptions())
    with pytest.raises(InvalidOptions):
        emit_layered(add_preserving_actions(bridge6), graph, -1, EncodeOptions())


def test_makespan_zero_goal_in_init(solver_config):
    problem = make_problem(["p", "q"], [make_action("a", add=["q"])], ["p"], ["p"])
    result = layered_solve(problem, 0, solver_config)
    # an empty plan grounds no weak constraints, so the verdict is plain SAT
    assert result.status in (SAT, OPTIMUM)
    assert not result.cost


def test_makespan_zero_goal_not_in_init(solver_config):
    problem = make_problem(["p", "q"], [make_action("a", add=["q"])], ["p"], ["q"])
    result = layered_solve(problem, 0, solver_config)
    assert result.status == UNSAT


def test_chain_optimum(solver_config):
    a = make_action("a", pre=["p"], add=["q"], delete=["p"], cost=2)
    b = make_action("b", pre=["q"], add=["r"], cost=3)
    problem = make_problem(["p", "q", "r"], [a, b], ["p"], ["r"])
    assert layered_solve(problem, 1, solver_config).status == UNSAT
    result = layered_solve(problem, 2, solver_config)
    assert result.status == OPTIMUM and result.cost == 5


def two_producer_problem(a_pre, a_del, b_pre, b_del):
    """Both actions must fire in the single layer: each is the sole goal producer."""
    a = make_action("a", pre=a_pre, add=["ga"], delete=a_del, cost=1)
    b = make_action("b", pre=b_pre, add=["gb"], delete=b_del, cost=1)
    return make_problem(["f", "ga", "gb"], [a, b], ["f"], ["ga", "gb"])


MUTEX_CASES = [
    # a deletes f which b needs; vary whether a needs f and b deletes f.
    # The last flag says whether serializing in a second layer can rescue
    # the plan (it cannot when both actions consume f).
    ([], ["f"], ["f"], [], True),
    (["f"], ["f"], ["f"], [], True),
    ([], ["f"], ["f"], ["f"], True),
    (["f"], ["f"], ["f"], ["f"], False),
]


@pytest.mark.parametrize("style", ["reduced", "quadratic"])
@pytest.mark.parametrize("case", MUTEX_CASES)
def test_interfering_pair_cannot_share_a_layer(case, style, solver_config):
    *shape, serializable = case
    problem = two_producer_problem(*shape)
    opts = EncodeOptions(mutex_style=style)
    assert layered_solve(problem, 1, solver_config, opts).status == UNSAT
    result = layered_solve(problem, 2, solver_config, opts)
    if serializable:
        assert result.status == OPTIMUM and result.cost == 2
    else:
        assert result.status == UNSAT


@pytest.mark.parametrize("style", ["reduced", "quadratic"])
def test_independent_pair_shares_a_layer(style, solver_config):
    problem = two_producer_problem([], [], ["f"], [])
    result = layered_solve(problem, 1, solver_config, EncodeOptions(mutex_style=style))
    assert result.status == OPTIMUM and result.cost == 2


def test_conflicting_effects_block_persistence(solver_config):
    # b deletes f in the same layer a adds it: f cannot hold afterwards
    a = make_action("a", add=["f"], cost=1)
    b = make_action("b", add=["gb"], delete=["f"], cost=1)
    problem = make_problem(["f", "gb"], [a, b], [], ["f", "gb"])
    assert layered_solve(problem, 1, solver_config).status == UNSAT
    relaxed = make_problem(["f", "gb"], [a, b], [], ["gb"])
    assert layered_solve(relaxed, 1, solver_config).status == OPTIMUM


def mutex_precondition_problem(a_pre):
    flip = make_action("flip", pre=["off"], add=["on"], delete=["off"], cost=1)
    mk = make_action("mk", add=["aux"], cost=1)
    a = make_action("a", pre=a_pre, add=["ga"], cost=1)
    b = make_action("b", pre=["off", "aux"], add=["gb"], cost=1)
    return make_problem(["on", "off", "aux", "ga", "gb"],
                        [flip, mk, a, b], ["off"], ["ga", "gb"])


def test_mutex_preconditions_block_sharing(solver_config):
    # a needs on, b needs off; both are first reachable in layer 1 of two,
    # so they would have to share it, but on/off never co-hold
    problem = mutex_precondition_problem(["on", "aux"])
    assert layered_solve(problem, 2, solver_config).status == UNSAT
    compatible = mutex_precondition_problem(["aux"])
    result = layered_solve(compatible, 2, solver_config)
    assert result.status == OPTIMUM


@pytest.mark.parametrize("seed", [3, 4, 5, 6])
def test_mutex_styles_agree_on_random_instances(seed, solver_config):
    problem = random_problem(random.Random(seed), max_fluents=5, max_actions=6)
    for makespan in (1, 2, 3):
        results = {}
        for style in ("reduced", "quadratic"):
            r = layered_solve(problem, makespan, solver_config,
                              EncodeOptions(mutex_style=style))
            results[style] = (r.status, r.cost)
        assert results["reduced"] == results["quadratic"]


def test_cost_bound_prunes(solver_config):
    a = make_action("a", pre=["p"], add=["q"], delete=["p"], cost=2)
    b = make_action("b", pre=["q"], add=["r"], cost=3)
    problem = make_problem(["p", "q", "r"], [a, b], ["p"], ["r"])
    tight = layered_solve(problem, 2, solver_config, EncodeOptions(cost_bound=5))
    assert tight.status == UNSAT
    loose = layered_solve(problem, 2, solver_config, EncodeOptions(cost_bound=6))
    assert loose.status == OPTIMUM and loose.cost == 5
