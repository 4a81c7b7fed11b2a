"""Blum-Furst planning graph with relaxed action interference.

Interference here deliberately excludes the conflicting-effects case (one
action adds what another deletes): that conflict is enforced at encode time
through the deleted/2 constraint, which admits strictly more parallelism
than the classical graph (cf. the reduced mutex encoding).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import GroundProblem

UNREACHABLE = "unreachable"


@dataclass
class PlanningGraph:
    problem: GroundProblem
    fluent_level: dict[str, int]
    action_level: dict[str, int]
    mutex_fluent_by_level: list[set[frozenset]]
    mutex_act_by_level: list[set[frozenset]]
    leveled_off: int

    def valid_fluent(self, fluent: str, level: int) -> bool:
        lvl = self.fluent_level.get(fluent)
        return lvl is not None and lvl <= level

    def valid_act(self, name: str, level: int) -> bool:
        lvl = self.action_level.get(name)
        return lvl is not None and lvl <= level

    def fluent_mutex_at(self, level: int) -> set[frozenset]:
        if level >= len(self.mutex_fluent_by_level):
            level = len(self.mutex_fluent_by_level) - 1
        return self.mutex_fluent_by_level[level]

    def persistent_fluent_mutexes(self) -> set[frozenset]:
        """Pairs still mutex once the graph has leveled off."""
        return set(self.mutex_fluent_by_level[-1])

    def to_debug_dict(self) -> dict:
        return {
            "fluent_level": dict(sorted(self.fluent_level.items())),
            "action_level": dict(sorted(self.action_level.items())),
            "persistent_mutex": sorted(sorted(p) for p in self.persistent_fluent_mutexes()),
            "leveled_off": self.leveled_off,
        }


def _interfere(a, b) -> bool:
    """One deletes the other's precondition (conflicting effects excluded)."""
    return bool(a.delete & b.pre) or bool(b.delete & a.pre)


def build(problem: GroundProblem) -> PlanningGraph:
    """Expand the leveled graph until fluent levels and mutexes stabilize."""
    if not problem.has_preserving:
        raise ValueError("planning graph expects preserving actions to be present")
    by_name = {a.name: a for a in problem.actions}
    fluent_level = {f: 0 for f in problem.init}
    action_level: dict[str, int] = {}
    mutex_fluent_by_level: list[set[frozenset]] = [set()]
    mutex_act_by_level: list[set[frozenset]] = []
    level = 0
    while True:
        fluents_here = {f for f, l in fluent_level.items() if l <= level}
        fmutex_here = mutex_fluent_by_level[level]
        # actions applicable at this level: preconditions present and non-mutex
        acts_here = []
        for a in problem.actions:
            if a.pre <= fluents_here and not any(
                    frozenset((p, q)) in fmutex_here
                    for p in a.pre for q in a.pre if p != q):
                acts_here.append(a)
                if a.name not in action_level:
                    action_level[a.name] = level
        # action mutexes: interference, or all supporting precondition pairs mutex
        amutex = set()
        for i in range(len(acts_here)):
            for j in range(i + 1, len(acts_here)):
                a, b = acts_here[i], acts_here[j]
                if _interfere(a, b):
                    amutex.add(frozenset((a.name, b.name)))
                    continue
                if any(frozenset((p, q)) in fmutex_here
                       for p in a.pre for q in b.pre if p != q):
                    amutex.add(frozenset((a.name, b.name)))
        mutex_act_by_level.append(amutex)
        # next fluent layer
        producers: dict[str, list] = {}
        for a in acts_here:
            for f in a.add:
                producers.setdefault(f, []).append(a)
                if f not in fluent_level:
                    fluent_level[f] = level + 1
        fluents_next = set(producers)
        fmutex_next = set()
        for p in sorted(fluents_next):
            for q in sorted(fluents_next):
                if p >= q:
                    continue
                pair_mutex = True
                for a in producers[p]:
                    for b in producers[q]:
                        if a.name == b.name:
                            pair_mutex = False
                        elif frozenset((a.name, b.name)) not in amutex:
                            pair_mutex = False
                    if not pair_mutex:
                        break
                if pair_mutex:
                    fmutex_next.add(frozenset((p, q)))
        mutex_fluent_by_level.append(fmutex_next)
        if fluents_next == fluents_here and fmutex_next == mutex_fluent_by_level[level]:
            return PlanningGraph(problem, fluent_level, action_level,
                                 mutex_fluent_by_level, mutex_act_by_level, level)
        level += 1
        if level > len(problem.fluents) + len(problem.actions) + 2:
            raise RuntimeError("planning graph failed to level off")


def first_goal_layer(graph: PlanningGraph, goals=None):
    """Lowest level where all goals are present and pairwise non-mutex."""
    goals = set(graph.problem.goal if goals is None else goals)
    if not goals:
        return 0
    for level in range(graph.leveled_off + 1):
        if all(graph.valid_fluent(g, level) for g in goals):
            fmutex = graph.fluent_mutex_at(level)
            if not any(frozenset((p, q)) in fmutex for p in goals for q in goals if p < q):
                return level
    return UNREACHABLE
