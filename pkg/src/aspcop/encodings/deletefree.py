"""One-shot delete-free planning encodings.

Both variants solve the minimum acyclic support-subgraph problem: the
forward one builds the reachable closure up from the initial fluents, the
backward one chains from the goal and adds explicit support propagation so
stable-model semantics rejects cyclic support.
"""

from __future__ import annotations

from ..model import GroundProblem
from .common import AspProgram, problem_facts

FORWARD = """\
holds(F) :- init(F).
{happens(A)} :- holds(F) : pre(A,F); action(A); not preserving(A).
holds(F) :- add(A,F); happens(A).
:- goal(F); not holds(F).
:~ happens(A); cost(A,C). [C@0,A]
#show happens/1.
"""

BACKWARD = """\
holds(F) :- goal(F).
{happens(A) : add(A,F), not preserving(A)} >= 1 :- holds(F); not init(F).
holds(F) :- pre(A,F); happens(A).
supportFluent(F) :- init(F); holds(F).
supportAct(A) :- supportFluent(F) : pre(A,F), holds(F); happens(A).
supportFluent(F) :- supportAct(A); happens(A); add(A,F); holds(F).
:- holds(F); not supportFluent(F).
:~ happens(A); cost(A,C). [C@0,A]
#show happens/1.
"""


def emit_delete_free(problem: GroundProblem, direction: str = "forward") -> AspProgram:
    """Complete cost-minimizing delete-free program (deletes ignored by construction)."""
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    lines = problem_facts(problem)
    lines.append(FORWARD if direction == "forward" else BACKWARD)
    return AspProgram("\n".join(lines) + "\n", "delete-free-%s" % direction)
