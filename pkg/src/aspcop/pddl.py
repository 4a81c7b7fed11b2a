"""Typed STRIPS PDDL frontend with :action-costs, plus grounding.

Supported requirements: :strips, :typing, :action-costs.  Anything else
(notably :equality and conditional effects) is rejected up front.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .model import GroundAction, GroundProblem, make_problem
from .terms import mangle


class ParseError(Exception):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = "%s (line %d, column %d)" % (message, line, column)
        super().__init__(message)
        self.line = line
        self.column = column


class UnsupportedRequirement(ParseError):
    pass


class GroundingExplosion(Exception):
    pass


SUPPORTED_REQUIREMENTS = {":strips", ":typing", ":action-costs"}


# ---------------------------------------------------------------------------
# s-expression reader

@dataclass
class Token:
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        c = text[i]
        if c == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            col += 1
            i += 1
            continue
        if c in "()":
            tokens.append(Token(c, line, col))
            col += 1
            i += 1
            continue
        start = i
        start_col = col
        while i < len(text) and not text[i].isspace() and text[i] not in "();":
            i += 1
            col += 1
        tokens.append(Token(text[start:i], line, start_col))
    return tokens


def _read_sexprs(text: str):
    tokens = _tokenize(text)
    pos = [0]

    def read():
        if pos[0] >= len(tokens):
            raise ParseError("unexpected end of input")
        tok = tokens[pos[0]]
        pos[0] += 1
        if tok.text == "(":
            items = []
            while True:
                if pos[0] >= len(tokens):
                    raise ParseError("unbalanced parenthesis", tok.line, tok.column)
                if tokens[pos[0]].text == ")":
                    pos[0] += 1
                    return items
                items.append(read())
        if tok.text == ")":
            raise ParseError("unexpected ')'", tok.line, tok.column)
        return tok

    out = []
    while pos[0] < len(tokens):
        out.append(read())
    return out


def _sym(x) -> str:
    if isinstance(x, Token):
        return x.text.lower()
    raise ParseError("expected a symbol, got a list")


# ---------------------------------------------------------------------------
# domain / problem ASTs

@dataclass
class Predicate:
    name: str
    params: list[tuple[str, str]]  # (variable, type)


@dataclass
class ActionSchema:
    name: str
    params: list[tuple[str, str]]
    pre: list[tuple[str, ...]]     # positive literals as (pred, arg...)
    add: list[tuple[str, ...]]
    delete: list[tuple[str, ...]]
    cost: int | None = None        # None -> default cost


@dataclass
class DomainAst:
    name: str
    types: dict[str, str]          # type -> parent ("object" is the root)
    predicates: dict[str, Predicate]
    schemas: list[ActionSchema]
    has_costs: bool = False

    def subtypes(self, ty: str) -> set[str]:
        out = {ty}
        changed = True
        while changed:
            changed = False
            for t, parent in self.types.items():
                if parent in out and t not in out:
                    out.add(t)
                    changed = True
        return out


@dataclass
class ProblemAst:
    name: str
    objects: dict[str, str]        # object -> type
    init: list[tuple[str, ...]]
    goal: list[tuple[str, ...]]
    minimize_cost: bool = False


def _parse_typed_list(items) -> list[tuple[str, str]]:
    """Parse ``a b - t c - u`` into [(a,t),(b,t),(c,u)]; untyped entries get 'object'."""
    out = []
    pending = []
    i = 0
    while i < len(items):
        text = _sym(items[i])
        if text == "-":
            if i + 1 >= len(items):
                raise ParseError("dangling '-' in typed list")
            ty = _sym(items[i + 1])
            out.extend((name, ty) for name in pending)
            pending = []
            i += 2
        else:
            pending.append(text)
            i += 1
    out.extend((name, "object") for name in pending)
    return out


def _literal(expr) -> tuple[str, ...]:
    if isinstance(expr, Token):
        raise ParseError("expected a literal", expr.line, expr.column)
    return tuple(_sym(x) for x in expr)


def _conjunction(expr) -> list[tuple[str, ...]]:
    if not expr:
        raise ParseError("empty condition")
    if isinstance(expr[0], Token) and _sym(expr[0]) == "and":
        return [_literal(e) for e in expr[1:]]
    return [_literal(expr)]


def parse_domain(text: str) -> DomainAst:
    top = _read_sexprs(text)
    if not top:
        raise ParseError("empty domain file")
    form = top[0]
    if _sym(form[0]) != "define":
        raise ParseError("expected (define (domain ...))")
    name = _sym(form[1][1])
    domain = DomainAst(name, {"object": "object"}, {}, [])
    for section in form[2:]:
        head = _sym(section[0])
        if head == ":requirements":
            for req in section[1:]:
                r = _sym(req)
                if r not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedRequirement("unsupported requirement %s" % r)
                if r == ":action-costs":
                    domain.has_costs = True
        elif head == ":types":
            for t, parent in _parse_typed_list(section[1:]):
                domain.types[t] = parent
                domain.types.setdefault(parent, "object")
        elif head == ":constants":
            raise UnsupportedRequirement("domain :constants are not supported")
        elif head == ":functions":
            names = [x for x in section[1:] if not isinstance(x, Token)]
            for fn in names:
                if _sym(fn[0]) != "total-cost":
                    raise UnsupportedRequirement("only (total-cost) is supported in :functions")
        elif head == ":predicates":
            for p in section[1:]:
                pname = _sym(p[0])
                domain.predicates[pname] = Predicate(pname, _parse_typed_list(p[1:]))
        elif head == ":action":
            domain.schemas.append(_parse_action(domain, section))
        else:
            raise ParseError("unknown domain section %s" % head)
    _check_domain(domain)
    return domain


def _parse_action(domain: DomainAst, section) -> ActionSchema:
    name = _sym(section[1])
    body = section[2:]
    params: list[tuple[str, str]] = []
    pre: list[tuple[str, ...]] = []
    add: list[tuple[str, ...]] = []
    delete: list[tuple[str, ...]] = []
    cost = None
    i = 0
    while i < len(body):
        key = _sym(body[i])
        value = body[i + 1]
        if key == ":parameters":
            params = _parse_typed_list(value)
        elif key == ":precondition":
            pre = _conjunction(value)
        elif key == ":effect":
            effects = value
            if isinstance(effects[0], Token) and _sym(effects[0]) == "and":
                effects = effects[1:]
            else:
                effects = [effects]
            for eff in effects:
                head = _sym(eff[0]) if isinstance(eff[0], Token) else None
                if head == "not":
                    delete.append(_literal(eff[1]))
                elif head == "increase":
                    amount = eff[2]
                    if isinstance(amount, Token):
                        cost = int(amount.text)
                    else:
                        raise UnsupportedRequirement("only constant action costs are supported")
                elif head == "when":
                    raise UnsupportedRequirement("conditional effects are not supported")
                else:
                    add.append(_literal(eff))
        else:
            raise ParseError("unknown action section %s" % key)
        i += 2
    return ActionSchema(name, params, pre, add, delete, cost)


def _check_domain(domain: DomainAst):
    for schema in domain.schemas:
        bound = {v for v, _ in schema.params}
        for lit in itertools.chain(schema.pre, schema.add, schema.delete):
            if lit[0] == "=":
                raise UnsupportedRequirement("unsupported requirement :equality")
            if lit[0] not in domain.predicates:
                raise ParseError("undeclared predicate %s in action %s" % (lit[0], schema.name))
            if len(lit) - 1 != len(domain.predicates[lit[0]].params):
                raise ParseError("arity mismatch for %s in action %s" % (lit[0], schema.name))
            for arg in lit[1:]:
                if arg.startswith("?") and arg not in bound:
                    raise ParseError("unbound parameter %s in action %s" % (arg, schema.name))


def parse_problem(text: str) -> ProblemAst:
    top = _read_sexprs(text)
    if not top:
        raise ParseError("empty problem file")
    form = top[0]
    if _sym(form[0]) != "define":
        raise ParseError("expected (define (problem ...))")
    name = _sym(form[1][1])
    problem = ProblemAst(name, {}, [], [])
    saw_goal = False
    for section in form[2:]:
        head = _sym(section[0])
        if head == ":domain":
            continue
        if head == ":objects":
            for obj, ty in _parse_typed_list(section[1:]):
                problem.objects[obj] = ty
        elif head == ":init":
            for lit in section[1:]:
                if isinstance(lit[0], Token) and _sym(lit[0]) == "=":
                    continue  # (= (total-cost) 0)
                problem.init.append(_literal(lit))
        elif head == ":goal":
            saw_goal = True
            problem.goal = _conjunction(section[1])
        elif head == ":metric":
            problem.minimize_cost = True
        else:
            raise ParseError("unknown problem section %s" % head)
    if not saw_goal or not problem.goal:
        raise ParseError("problem has no goal section")
    return problem


# ---------------------------------------------------------------------------
# grounding

def _type_objects(domain: DomainAst, problem: ProblemAst, ty: str) -> list[str]:
    subtypes = domain.subtypes(ty)
    return sorted(o for o, t in problem.objects.items() if t in subtypes)


def _ground_literal(lit, binding) -> str:
    args = [binding.get(a, a) for a in lit[1:]]
    return mangle(lit[0], tuple(args))


def ground(domain: DomainAst, problem: ProblemAst, action_cap: int = 10 ** 6) -> GroundProblem:
    """Ground schemas over type-consistent bindings, pruning by relaxed reachability."""
    for obj, ty in problem.objects.items():
        if ty not in domain.types:
            raise ParseError("object %s has unknown type %s" % (obj, ty))
    candidates: list[GroundAction] = []
    default_cost = 1
    for schema in sorted(domain.schemas, key=lambda s: s.name):
        domains = [_type_objects(domain, problem, ty) for _, ty in schema.params]
        count = 1
        for d in domains:
            count *= max(len(d), 0)
        if len(candidates) + count > action_cap:
            raise GroundingExplosion("more than %d ground actions" % action_cap)
        for combo in itertools.product(*domains):
            binding = {v: obj for (v, _), obj in zip(schema.params, combo)}
            name = mangle(schema.name, combo)
            pre = frozenset(_ground_literal(l, binding) for l in schema.pre)
            add = frozenset(_ground_literal(l, binding) for l in schema.add)
            delete = frozenset(_ground_literal(l, binding) for l in schema.delete)
            cost = schema.cost if schema.cost is not None else default_cost
            candidates.append(GroundAction(name, pre, add, delete, cost))
    init = frozenset(_ground_literal(l, {}) for l in problem.init)
    goal = frozenset(_ground_literal(l, {}) for l in problem.goal)
    # relaxed forward exploration: keep only reachable fluents and actions
    reachable = set(init)
    remaining = list(candidates)
    kept: list[GroundAction] = []
    changed = True
    while changed:
        changed = False
        for a in list(remaining):
            if a.pre <= reachable:
                remaining.remove(a)
                kept.append(a)
                reachable |= a.add
                changed = True
    fluents = reachable | goal
    kept = [GroundAction(a.name, a.pre, a.add & fluents, a.delete & fluents, a.cost)
            for a in kept]
    kept.sort(key=lambda a: a.name)
    return make_problem(fluents, kept, init, goal)
