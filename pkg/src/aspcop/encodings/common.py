"""Shared helpers for emitting ASP-Core-2 program text."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model import GroundProblem


@dataclass
class AspProgram:
    text: str
    kind: str
    makespan: int | None = None
    meta: dict = field(default_factory=dict)


def problem_facts(problem: GroundProblem, include_preserving: bool = True) -> list[str]:
    """Render the instance facts: fluent/action/pre/add/del/cost/init/goal."""
    lines = []
    for f in sorted(problem.fluents):
        lines.append("fluent(%s)." % f)
    for a in sorted(problem.actions, key=lambda a: a.name):
        if a.preserving and not include_preserving:
            continue
        lines.append("action(%s)." % a.name)
        if a.preserving:
            lines.append("preserving(%s)." % a.name)
        for f in sorted(a.pre):
            lines.append("pre(%s,%s)." % (a.name, f))
        for f in sorted(a.add):
            lines.append("add(%s,%s)." % (a.name, f))
        for f in sorted(a.delete):
            lines.append("del(%s,%s)." % (a.name, f))
        if not a.preserving:
            lines.append("cost(%s,%d)." % (a.name, a.cost))
    for f in sorted(problem.init):
        lines.append("init(%s)." % f)
    for f in sorted(problem.goal):
        lines.append("goal(%s)." % f)
    lines.append("#defined del/2. #defined pre/2. #defined add/2.")
    lines.append("#defined init/1. #defined goal/1. #defined preserving/1.")
    return lines
