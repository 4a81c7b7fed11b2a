import pytest

from aspcop import plangraph
from aspcop.model import add_preserving_actions, make_action, make_problem


@pytest.fixture(scope="module")
def bridge_graph(bridge6):
    return plangraph.build(add_preserving_actions(bridge6))


def test_requires_preserving(bridge6):
    with pytest.raises(ValueError):
        plangraph.build(bridge6)


def test_bridge_fluent_levels(bridge_graph):
    assert bridge_graph.fluent_level["at(joe,side_a)"] == 0
    assert bridge_graph.fluent_level["at(joe,side_b)"] == 1
    assert bridge_graph.valid_fluent("at(joe,side_b)", 1)
    assert not bridge_graph.valid_fluent("at(joe,side_b)", 0)


def test_bridge_mutex_level_one(bridge_graph):
    pair = frozenset(("at(joe,side_a)", "at(joe,side_b)"))
    assert pair in bridge_graph.mutex_fluent_by_level[1]


def test_bridge_persistent_mutexes(bridge_graph):
    persistent = bridge_graph.persistent_fluent_mutexes()
    assert frozenset(("lantern_at(side_a)", "lantern_at(side_b)")) in persistent
    assert frozenset(("at(jack,side_a)", "at(jack,side_b)")) in persistent
    # fluents of different people are never persistently mutex
    assert frozenset(("at(jack,side_b)", "at(joe,side_b)")) not in persistent


def test_interference_excludes_conflicting_effects():
    a = make_action("a", pre=["p"], add=["q"])
    b = make_action("b", pre=["p"], add=["r"], delete=["q"])
    # b deletes what a adds, but neither deletes the other's precondition
    assert not plangraph._interfere(a, b)
    c = make_action("c", pre=["q"], add=["r"])
    assert plangraph._interfere(b, c)


def test_first_goal_layer_bridge(bridge_graph):
    # every pair of goal fluents shares a cross_together producer, so the
    # binary mutex test is already satisfied one level up (the graph is an
    # optimistic bound; the real minimum makespan is far larger)
    assert plangraph.first_goal_layer(bridge_graph) == 1


def test_first_goal_layer_unreachable():
    a = make_action("a", pre=["p"], add=["q"])
    problem = make_problem(["p", "q", "r"], [a], [], ["r"])
    graph = plangraph.build(add_preserving_actions(problem))
    assert plangraph.first_goal_layer(graph) is plangraph.UNREACHABLE


def test_empty_goal_is_layer_zero():
    a = make_action("a", pre=["p"], add=["q"])
    problem = make_problem(["p", "q"], [a], ["p"], [])
    graph = plangraph.build(add_preserving_actions(problem))
    assert plangraph.first_goal_layer(graph) == 0


def test_levels_monotone_and_leveled_off(bridge_graph):
    for f, level in bridge_graph.fluent_level.items():
        assert 0 <= level <= bridge_graph.leveled_off
    # mutexes only ever relax as levels grow
    for k in range(1, len(bridge_graph.mutex_fluent_by_level) - 1):
        assert (bridge_graph.mutex_fluent_by_level[k + 1]
                <= bridge_graph.mutex_fluent_by_level[k])
