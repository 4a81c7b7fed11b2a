"""Layered (makespan-indexed) planning programs.

Emits the SATPlan-style backward-chaining core with either the quadratic
pairwise action-mutex constraint or the reduced cardinality block, plus the
optional pieces: cost weak constraints, the any-goal choice with the layered
make-progress constraint, the as-soon-as-possible constraint, a hard cost
bound, and the delete-free suffix layer used by the lower-bound solver.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..model import GroundProblem
from ..plangraph import PlanningGraph
from .common import AspProgram, problem_facts


class InvalidOptions(Exception):
    pass


@dataclass
class EncodeOptions:
    mutex_style: str = "reduced"          # "reduced" | "quadratic"
    any_goal: bool = False
    make_progress: bool = False
    asap_rule: bool = False
    suffix: bool = False
    cost_bound: int | None = None
    weak_constraints: bool = True

    def check(self):
        if self.mutex_style not in ("reduced", "quadratic"):
            raise InvalidOptions("unknown mutex style %r" % self.mutex_style)
        if self.asap_rule and not self.make_progress:
            raise InvalidOptions("the as-soon-as-possible rule requires make_progress")
        if self.suffix and not self.any_goal:
            raise InvalidOptions("the suffix layer requires the any-goal encoding")
        if self.make_progress and not self.any_goal:
            raise InvalidOptions("make_progress is only meaningful with any_goal")


def variant_one_options(cost_bound=None) -> EncodeOptions:
    return EncodeOptions()


def variant_two_options(cost_bound=None, asap=False) -> EncodeOptions:
    return EncodeOptions(any_goal=True, make_progress=True, suffix=True,
                         asap_rule=asap, cost_bound=cost_bound)


def graph_facts(problem: GroundProblem, graph: PlanningGraph, makespan: int) -> list[str]:
    """validAct/validFluent per layer (clamped at level-off) and persistent mutex pairs."""
    lines = []
    for a in sorted(problem.actions, key=lambda a: a.name):
        first = graph.action_level.get(a.name)
        if first is None:
            continue
        for k in range(min(first, makespan), makespan):
            lines.append("validAct(%s,%d)." % (a.name, k))
    for f in sorted(problem.fluents):
        first = graph.fluent_level.get(f)
        if first is None:
            continue
        for k in range(first, makespan + 1):
            lines.append("validFluent(%s,%d)." % (f, k))
    for pair in sorted(tuple(sorted(p)) for p in graph.persistent_fluent_mutexes()):
        lines.append("mutex(%s,%s)." % pair)
    lines.append("#defined mutex/2. #defined validAct/2. #defined validFluent/2.")
    return lines


def _interference_pairs(problem: GroundProblem):
    acts = sorted(problem.actions, key=lambda a: a.name)
    for i in range(len(acts)):
        for j in range(i + 1, len(acts)):
            a, b = acts[i], acts[j]
            if a.delete & b.pre or b.delete & a.pre:
                yield a.name, b.name


CORE_RULES = """\
happens(A,K-1) : add(A,F), validAct(A,K-1) :- holds(F,K); K > 0; step(K).
holds(F,K) :- pre(A,F); happens(A,K); validFluent(F,K).
:- holds(F,0); not init(F).
deleted(F,K) :- happens(A,K); del(A,F).
:- holds(F,K); deleted(F,K-1).
:- mutex(F,G); holds(F,K); holds(G,K); step(K).
#defined deleted/2.
"""

REDUCED_MUTEX = """\
used_preserved(F,K) :- happens(A,K); pre(A,F); not del(A,F).
deleted_unused(F,K) :- happens(A,K); del(A,F); not pre(A,F).
:- {used_preserved(F,K); deleted_unused(F,K);
    happens(A,K) : pre(A,F), del(A,F)} > 1; validFluent(F,K); step(K).
"""

QUADRATIC_MUTEX = """\
:- mutexAct(A,B); happens(A,K); happens(B,K).
#defined mutexAct/2.
"""

MAKE_PROGRESS = """\
:- not holds(F,K) : not holds(F,J), fluent(F); step(J); step(K); J < K.
"""

ASAP_RULE = """\
used(F,K) :- happens(A,K); pre(A,F); not preserving(A).
:- happens(A,K); K > 0; not preserving(A);
   holds(F,K-1) : pre(A,F); not used(F,K-1) : del(A,F);
   not deleted(F,K-1) : add(A,F), holds(F,K).
"""

SUFFIX_LAYER = """\
suffix(holds(F)) :- goal(F).
{suffix(happens(A)) : add(A,F), not preserving(A)} >= 1 :-
  suffix(holds(F)); not subgoal(F).
suffix(holds(F)) :- pre(A,F); suffix(happens(A)); not preserving(A).
suffix(supF(F)) :- subgoal(F); suffix(holds(F)).
suffix(supA(A)) :- suffix(supF(F)) : pre(A,F), suffix(holds(F));
  suffix(happens(A)).
suffix(supF(F)) :- suffix(supA(A)); add(A,F); suffix(holds(F)).
:- suffix(holds(F)); not suffix(supF(F)).
useSuffix :- suffix(happens(_)).
"""


def emit_suffix_layer(subgoal_rule: str | None = None, weak_constraints: bool = True) -> str:
    """Delete-free suffix fragment; the host defines subgoal/1 at its final layer."""
    parts = []
    if subgoal_rule:
        parts.append(subgoal_rule)
    parts.append(SUFFIX_LAYER)
    if weak_constraints:
        parts.append(":~ suffix(happens(A)); cost(A,C). [C@0,A,sfx]")
    return "\n".join(parts)


def emit_asap_rule() -> str:
    """Constraint fragment forcing actions to happen as soon as possible."""
    return ASAP_RULE


def emit_layered(problem: GroundProblem, graph: PlanningGraph, makespan: int,
                 opts: EncodeOptions) -> AspProgram:
    """Emit a complete layered program at the given makespan."""
    opts.check()
    if makespan < 0:
        raise InvalidOptions("makespan must be >= 0")
    if not problem.has_preserving:
        raise InvalidOptions("layered encodings require preserving actions")
    lines = problem_facts(problem)
    lines += graph_facts(problem, graph, makespan)
    lines.append("step(0..%d)." % makespan)
    lines.append("finalStep(%d)." % makespan)
    if opts.any_goal:
        lines.append("{holds(F,K)} :- validFluent(F,K); finalStep(K).")
    else:
        lines.append("holds(F,K) :- goal(F); finalStep(K).")
    lines.append(CORE_RULES)
    if opts.mutex_style == "reduced":
        lines.append(REDUCED_MUTEX)
    else:
        for a, b in _interference_pairs(problem):
            lines.append("mutexAct(%s,%s)." % (a, b))
        lines.append(QUADRATIC_MUTEX)
    if opts.make_progress:
        lines.append(MAKE_PROGRESS)
    if opts.asap_rule:
        lines.append(ASAP_RULE)
    if opts.suffix:
        lines.append(emit_suffix_layer("subgoal(F) :- holds(F,%d)." % makespan,
                                       opts.weak_constraints))
        lines.append("#show useSuffix/0.")
        lines.append("#show suffix(happens(A)) : suffix(happens(A)).")
        lines.append("#show subgoal/1.")
    if opts.weak_constraints:
        lines.append(":~ happens(A,K); cost(A,C). [C@0,A,K]")
    if opts.cost_bound is not None:
        if opts.suffix:
            lines.append(
                ":- #sum{C,A,K : happens(A,K), cost(A,C); "
                "C,A,sfx : suffix(happens(A)), cost(A,C)} >= %d." % opts.cost_bound)
        else:
            lines.append(":- #sum{C,A,K : happens(A,K), cost(A,C)} >= %d." % opts.cost_bound)
    lines.append("#show happens/2.")
    lines.append("#show holds/2.")
    kind = "variant2" if opts.any_goal else "variant1"
    return AspProgram("\n".join(lines) + "\n", kind, makespan,
                      meta={"opts": opts})
