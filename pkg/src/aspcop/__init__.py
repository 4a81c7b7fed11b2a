"""Cost-optimal STRIPS planning via answer set programming.

Two complementary planners over a common STRIPS core:

- a two-threaded layered planner converging an upper-bound pipeline
  (cost-minimizing SATPlan-style encoding) and a lower-bound pipeline
  (any-goal encoding with make-progress rule and delete-free suffix), and
- a stepless planner that arranges action occurrences into a partially
  ordered event graph and grows its occurrence bag until the optimum
  needs no delete-free suffix.

A brute-force oracle, a planning-graph preprocessor, a PDDL/JSON
frontend, and a benchmark CLI round out the package.
"""

from .model import (GroundAction, GroundProblem, PartialOrderPlan,
                    add_preserving_actions, apply, canonical_partial_order,
                    load_problem, make_action, make_problem, plan_cost,
                    problem_from_json, problem_to_json, validate_plan)

__all__ = [
    "GroundAction", "GroundProblem", "PartialOrderPlan",
    "add_preserving_actions", "apply", "canonical_partial_order",
    "load_problem", "make_action", "make_problem", "plan_cost",
    "problem_from_json", "problem_to_json", "validate_plan",
]

__version__ = "0.1.0"
