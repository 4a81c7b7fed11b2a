import random
from pathlib import Path

import pytest

from aspcop.model import load_problem, make_action, make_problem
from aspcop.solver import SolverConfig, default_solver_command

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def bridge6():
    return load_problem(FIXTURES / "bridge6.json")


@pytest.fixture(scope="session")
def bridge4():
    return load_problem(FIXTURES / "bridge4.json")


@pytest.fixture(scope="session")
def gripper1():
    from aspcop import pddl
    domain = pddl.parse_domain((FIXTURES / "gripper1-domain.pddl").read_text())
    problem = pddl.parse_problem((FIXTURES / "gripper1-problem.pddl").read_text())
    return pddl.ground(domain, problem)


@pytest.fixture(scope="session")
def solver_config():
    return SolverConfig(command=default_solver_command())


def random_problem(rng: random.Random, max_fluents=8, max_actions=10, max_cost=5):
    """Small random STRIPS instance; add/delete sets are kept disjoint."""
    n_fluents = rng.randint(2, max_fluents)
    fluents = ["f%d" % i for i in range(n_fluents)]
    n_actions = rng.randint(1, max_actions)
    actions = []
    for i in range(n_actions):
        pre = rng.sample(fluents, rng.randint(0, min(2, n_fluents)))
        add = rng.sample(fluents, rng.randint(1, min(2, n_fluents)))
        deletable = [f for f in fluents if f not in add]
        delete = rng.sample(deletable, rng.randint(0, min(2, len(deletable))))
        actions.append(make_action("a%d" % i, pre, add, delete,
                                   cost=rng.randint(0, max_cost)))
    init = frozenset(rng.sample(fluents, rng.randint(0, n_fluents)))
    goal = frozenset(rng.sample(fluents, rng.randint(1, min(3, n_fluents))))
    return make_problem(fluents, actions, init, goal)
