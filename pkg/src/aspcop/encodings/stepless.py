"""Stepless (makespan-free) planning program and model decoding.

The program arranges action and fluent occurrences into an event graph whose
acyclicity is enforced by stable-model supportedness, encodes strong
minimality with a two-cut disjunctive saturation block, and appends a
delete-free suffix layer whose use is discouraged at a lower optimization
priority and allowed only when some occurrence supply is exhausted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model import GroundProblem
from ..terms import split_atom
from .common import AspProgram, problem_facts


class PreservingActionsPresent(Exception):
    pass


class MalformedModel(Exception):
    pass


class InvariantViolation(Exception):
    pass


@dataclass(frozen=True)
class OccurrenceBag:
    """How many indexed copies of each fluent and action the program may use."""
    fluent_count: dict[str, int]
    action_count: dict[str, int]
    init: frozenset[str]

    def __post_init__(self):
        for name, count in list(self.fluent_count.items()) + list(self.action_count.items()):
            if count < 1:
                raise ValueError("occurrence count for %s must be >= 1" % name)

    def facts(self) -> list[str]:
        lines = []
        for f in sorted(self.fluent_count):
            if f in self.init:
                lines.append("is(fluentOcc(%s,0))." % f)
            for m in range(1, self.fluent_count[f] + 1):
                lines.append("is(fluentOcc(%s,%d))." % (f, m))
        for a in sorted(self.action_count):
            for n in range(1, self.action_count[a] + 1):
                lines.append("is(actOcc(%s,%d))." % (a, n))
        return lines

    def size(self) -> int:
        return sum(self.fluent_count.values()) + sum(self.action_count.values()) + len(self.init)


def initial_bag(problem: GroundProblem) -> OccurrenceBag:
    """One occurrence of everything, plus the zero'th occurrence of init fluents."""
    return OccurrenceBag(
        {f: 1 for f in problem.fluents},
        {a.name: 1 for a in problem.actions},
        problem.init,
    )


STEPLESS_CORE = """\
nextOcc(fluentOcc(F,0),fluentOcc(F,1)) :- fluent(F).
nextOcc(fluentOcc(F,M),fluentOcc(F,M+1)) :- is(fluentOcc(F,M)).
nextOcc(actOcc(A,N),actOcc(A,N+1)) :- is(actOcc(A,N)).

{causes(actOcc(A,N),fluentOcc(F,M)) : add(A,F), is(actOcc(A,N))}=1 :-
  holds(fluentOcc(F,M)); M > 0.
happens(AO) :- causes(AO,_).
:- {causes(AO,fluentOcc(F,M))} > 1; is(AO); fluent(F).

{permits(fluentOcc(F,M),actOcc(A,N)) : is(fluentOcc(F,M))}=1 :-
  happens(actOcc(A,N)); pre(A,F).
holds(FO) :- permits(FO,_).
{permits(fluentOcc(F,M),subgoal(F)) : is(fluentOcc(F,M))}=1 :-
  subgoal(F).
:- deleted(FO); permits(FO,subgoal(_)).

deletes(actOcc(A,N),fluentOcc(F,M)) :-
  permits(fluentOcc(F,M),actOcc(A,N)); del(A,F).
:- {deletes(_, FO)} > 1; is(FO).

{follows(actOcc(A,N),fluentOcc(F,M)) : holds(fluentOcc(F,M));
  follows(actOcc(A,N),fluentOcc(F,0))}=1 :-
  del(A,F); not pre(A,F); happens(actOcc(A,N)).

deleted(fluentOcc(F,0)) :- fluent(F); not init(F).
deleted(FO) :- deletes(_, FO).
deleted(FO) :- follows(_, FO).

:~ happens(actOcc(A,N)); cost(A,V). [V@0,A,N]

:- holds(fluentOcc(F,M+1)); not holds(fluentOcc(F,M));
   is(fluentOcc(F,M)); M > 0.
:- happens(BO); not happens(AO); nextOcc(AO,BO).

% successive occurrences of a fluent are successive truth intervals, so a
% new occurrence may only start once the previous one was actually deleted;
% otherwise re-adding a still-true fluent (a no-op in execution) would let a
% stale earlier occurrence vouch for a subgoal that a later delete kills
:- holds(GO); nextOcc(fluentOcc(F,M),GO); not deleted(fluentOcc(F,M)).

event(start(FO)) :- holds(FO).
event(end(FO)) :- holds(FO).
event(end(fluentOcc(F,0))) :- fluent(F).
event(AO) :- happens(AO).
event(subgoal(F)) :- subgoal(F).

actionTriggers(AO,start(FO)) :- causes(AO,FO).
actionTriggers(AO,end(FO)) :- deletes(AO,FO).

vertex(V) :- event(V); not actionTriggers(A,V) : is(A).
inVertex(E,V) :- actionTriggers(V,E).
inVertex(V,V) :- vertex(V).

edge(start(FO),end(FO)) :- holds(FO).
edge(start(FO),AO) :- permits(FO,AO).
edge(AO,end(FO)) :- permits(FO,AO); not deletes(AO,FO).

edge(end(FO),AO) :- follows(AO,FO).
edge(AO,start(GO)) :- follows(AO,FO); nextOcc(FO,GO); holds(GO).
edge(end(FO),start(GO)) :- holds(GO); nextOcc(FO,GO).
edge(AO,BO) :- happens(AO); happens(BO); nextOcc(AO,BO).

sup(in(E)) :- sup(D) : edge(D,E); event(E).
sup(V) :- sup(in(E)) : inVertex(E,V); vertex(V).
sup(E) :- sup(V); inVertex(E,V).
:- vertex(V); not sup(V).
"""

STRONG_MINIMALITY = """\
cut(cut1; cut2).

onSideOf(V,s,C) | onSideOf(V,t,C) :- vertex(V); cut(C).
onSideOf(E,X,C) :- inVertex(E,V); onSideOf(V,X,C).
onSideOf(subgoal(F),t,cut2) :- subgoal(F).
not_counterexample :- edge(D,E); onSideOf(D,t,C); onSideOf(E,s,C).
holdsOver(FO,cut2) :-
  onSideOf(start(FO),s,cut2); onSideOf(end(FO),t,cut2).
not_holdsOver(FO,cut1) :-
  onSideOf(start(FO),X,cut1); onSideOf(end(FO),X,cut1).
not_betweenCuts(AO) :- onSideOf(AO,s,cut1).
not_betweenCuts(AO) :- onSideOf(AO,t,cut2).
not_counterexample :- not_betweenCuts(AO) : happens(AO).
not_counterexample :-
  holdsOver(fluentOcc(F,_),cut2);
  not_holdsOver(fluentOcc(F,M),cut1) : holds(fluentOcc(F,M)).

:- not not_counterexample.
onSideOf(V,s,C) :- vertex(V); cut(C); not_counterexample.
onSideOf(V,t,C) :- vertex(V); cut(C); not_counterexample.
"""

SUFFIX_LAYER = """\
suffix(holds(F)) :- goal(F).
{subgoal(F); suffix(causes(A,F)) : add(A,F)} = 1 :- suffix(holds(F)).
suffix(happens(A)) :- suffix(causes(A,_)).
suffix(holds(F)) :- suffix(happens(A)); pre(A,F).

useSuffix :- suffix(happens(_)).

suffix(sup(holds(F))) :- subgoal(F).
suffix(sup(happens(A))) :-
  suffix(sup(holds(F))) : pre(A,F); suffix(happens(A)).
suffix(sup(holds(F))) :- suffix(sup(happens(A))); suffix(causes(A,F)).

:- suffix(happens(A)); not suffix(sup(happens(A))).
:- suffix(holds(F)); not suffix(sup(holds(F))).

:~ suffix(happens(A)); cost(A,V). [V@0,A,suffix]
:~ useSuffix. [1@-1]

saturated(fluent(F)) :-
  holds(fluentOcc(F,M)) : is(fluentOcc(F,M)), M > 0; fluent(F).
saturated(action(A)) :-
  happens(actOcc(A,N)) : is(actOcc(A,N)); action(A).

suffix(start(action(A))) :- subgoal(F) : pre(A,F); suffix(happens(A)).
suffix(start(fluent(F))) :- suffix(start(action(A))); suffix(causes(A,F)).

:- useSuffix; not saturated(X) : suffix(start(X)).
"""

SHOW = """\
#show causes/2.  #show deletes/2.  #show happens/1.
#show holds/1.  #show permits/2. #show follows/2.
#show suffix(happens(A)) : suffix(happens(A)).
#show useSuffix/0.
#show subgoal/1.
#show saturated/1.
"""


def emit_stepless(problem: GroundProblem, bag: OccurrenceBag) -> AspProgram:
    """Complete stepless program for a given occurrence bag."""
    if problem.has_preserving:
        raise PreservingActionsPresent("stepless planning has no preserving actions")
    lines = problem_facts(problem, include_preserving=False)
    lines += bag.facts()
    lines.append(STEPLESS_CORE)
    lines.append(STRONG_MINIMALITY)
    lines.append(SUFFIX_LAYER)
    lines.append(SHOW)
    return AspProgram("\n".join(lines) + "\n", "stepless",
                      meta={"bag_size": bag.size()})


@dataclass
class SteplessModel:
    happens: set[tuple[str, int]] = field(default_factory=set)
    holds: set[tuple[str, int]] = field(default_factory=set)
    causes: set[tuple[tuple[str, int], tuple[str, int]]] = field(default_factory=set)
    permits: set[tuple[tuple[str, int], object]] = field(default_factory=set)
    deletes: set[tuple[tuple[str, int], tuple[str, int]]] = field(default_factory=set)
    follows: set[tuple[tuple[str, int], tuple[str, int]]] = field(default_factory=set)
    suffix_happens: set[str] = field(default_factory=set)
    subgoal: set[str] = field(default_factory=set)
    saturated_fluents: set[str] = field(default_factory=set)
    saturated_actions: set[str] = field(default_factory=set)
    use_suffix: bool = False
    cost: int = 0

    def to_json(self) -> dict:
        return {
            "happens": sorted(["%s/%d" % o for o in self.happens]),
            "suffix_happens": sorted(self.suffix_happens),
            "subgoal": sorted(self.subgoal),
            "use_suffix": self.use_suffix,
            "cost": self.cost,
        }


def _occ(text: str) -> tuple[str, int]:
    functor, args = split_atom(text)
    if functor not in ("fluentOcc", "actOcc") or len(args) != 2:
        raise MalformedModel("expected an occurrence term, got %r" % text)
    return args[0], int(args[1])


def decode_stepless(atoms: list[str], cost: int = 0) -> SteplessModel:
    """Parse shown atoms into a SteplessModel and check structural invariants."""
    model = SteplessModel(cost=cost)
    for atom in atoms:
        functor, args = split_atom(atom)
        try:
            if functor == "happens":
                model.happens.add(_occ(args[0]))
            elif functor == "holds":
                model.holds.add(_occ(args[0]))
            elif functor == "causes":
                model.causes.add((_occ(args[0]), _occ(args[1])))
            elif functor == "deletes":
                model.deletes.add((_occ(args[0]), _occ(args[1])))
            elif functor == "follows":
                model.follows.add((_occ(args[0]), _occ(args[1])))
            elif functor == "permits":
                inner, inner_args = split_atom(args[1])
                if inner == "subgoal":
                    model.permits.add((_occ(args[0]), ("subgoal", inner_args[0])))
                else:
                    model.permits.add((_occ(args[0]), _occ(args[1])))
            elif functor == "suffix":
                inner, inner_args = split_atom(args[0])
                if inner == "happens":
                    model.suffix_happens.add(inner_args[0])
            elif functor == "subgoal":
                model.subgoal.add(args[0])
            elif functor == "useSuffix":
                model.use_suffix = True
            elif functor == "saturated":
                inner, inner_args = split_atom(args[0])
                if inner == "fluent":
                    model.saturated_fluents.add(inner_args[0])
                elif inner == "action":
                    model.saturated_actions.add(inner_args[0])
        except (IndexError, ValueError) as exc:
            raise MalformedModel("cannot decode atom %r: %s" % (atom, exc))
    _check_structure(model)
    return model


def _check_structure(model: SteplessModel):
    causers: dict[tuple[str, int], int] = {}
    for _, fo in model.causes:
        causers[fo] = causers.get(fo, 0) + 1
    for fo in model.holds:
        if fo[1] > 0 and causers.get(fo, 0) != 1:
            raise InvariantViolation("held occurrence %r has %d causes" % (fo, causers.get(fo, 0)))
    # follows/2 only orders an action after an occurrence's end event, so any
    # number of followers is fine; deletes/2 is the one-consumer relation
    deleters: dict[tuple[str, int], int] = {}
    for _, fo in model.deletes:
        deleters[fo] = deleters.get(fo, 0) + 1
    for fo, n in deleters.items():
        if n > 1:
            raise InvariantViolation("occurrence %r deleted %d times" % (fo, n))
    ended = set(deleters)
    ended.update(fo for _, fo in model.follows)
    for f, m in model.holds:
        if m > 1 and (f, m - 1) not in ended:
            raise InvariantViolation(
                "occurrence (%s,%d) holds but (%s,%d) was never deleted" % (f, m, f, m - 1))
    if bool(model.suffix_happens) != model.use_suffix:
        raise InvariantViolation("useSuffix flag disagrees with suffix actions")


def event_graph(model: SteplessModel):
    """Reconstruct the event DAG (vertices and edges) from a decoded model.

    Mirrors the program's event/vertex/edge rules; used for topological
    sorting and for re-verifying acyclicity outside the solver.
    """
    events: set = set()
    for fo in model.holds:
        events.add(("start", fo))
        events.add(("end", fo))
    for ao in model.happens:
        events.add(("act", ao))
    # end events of zero'th occurrences exist even when unused; only add the
    # ones referenced by follows edges to keep the decoded graph tight
    for _, fo in model.follows:
        events.add(("end", fo))

    triggered = {}
    for ao, fo in model.causes:
        triggered[("start", fo)] = ("act", ao)
    for ao, fo in model.deletes:
        triggered[("end", fo)] = ("act", ao)

    def vertex_of(ev):
        return triggered.get(ev, ev)

    edges: set = set()

    def connect(a, b):
        va, vb = vertex_of(a), vertex_of(b)
        if va != vb:
            edges.add((va, vb))

    next_holds = {}
    for f, m in model.holds:
        next_holds[(f, m)] = (f, m + 1) if (f, m + 1) in model.holds else None
    for fo in model.holds:
        connect(("start", fo), ("end", fo))
    for fo, target in model.permits:
        if target[0] == "subgoal" and not isinstance(target[1], int):
            continue
        connect(("start", fo), ("act", target))
        if (target, fo) not in model.deletes:
            connect(("act", target), ("end", fo))
    for ao, fo in model.follows:
        connect(("end", fo), ("act", ao))
        nxt = (fo[0], fo[1] + 1)
        if nxt in model.holds:
            connect(("act", ao), ("start", nxt))
    for f, m in model.holds:
        nxt = (f, m + 1)
        if nxt in model.holds:
            connect(("end", (f, m)), ("start", nxt))
        prev = (f, m - 1)
        if m > 1 and prev in model.holds:
            connect(("end", prev), ("start", (f, m)))
    for a, n in model.happens:
        nxt = (a, n + 1)
        if nxt in model.happens:
            connect(("act", (a, n)), ("act", nxt))
    vertices = {vertex_of(e) for e in events}
    return vertices, edges
