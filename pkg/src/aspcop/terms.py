"""Symbolic term rendering and parsing.

Fluents and actions are named by ground first-order terms rendered as text,
e.g. ``at(joe,side_a)`` or ``cross_alone(joe,side_b,side_a)``.  Rendering is
the identity on already-rendered names, so round-tripping through the ASP
solver is exact.
"""

from __future__ import annotations


def mangle(functor: str, args: tuple = ()) -> str:
    """Render a functor with arguments in the standard term style."""
    functor = functor.lower()
    if not args:
        return functor
    return "%s(%s)" % (functor, ",".join(str(a).lower() for a in args))


def parse_term(text: str) -> tuple:
    """Parse a ground term into (functor, [args]); args are nested terms or strings.

    ``at(joe,side_a)`` -> ("at", ["joe", "side_a"])
    ``causes(actOcc(a,1),fluentOcc(f,0))`` nests recursively.
    Integers are returned as ints.
    """
    text = text.strip()
    term, rest = _parse_one(text, 0)
    if rest != len(text):
        raise ValueError("trailing text in term: %r" % text)
    return term


def _parse_one(s: str, i: int):
    start = i
    while i < len(s):
        c = s[i]
        if c == "(":
            functor = s[start:i]
            args = []
            i += 1
            while True:
                arg, i = _parse_one(s, i)
                args.append(arg)
                if i >= len(s):
                    raise ValueError("unterminated term: %r" % s)
                if s[i] == ",":
                    i += 1
                    continue
                if s[i] == ")":
                    i += 1
                    return (functor, args), i
                raise ValueError("bad term syntax at %d: %r" % (i, s))
        if c in ",)":
            break
        i += 1
    atom = s[start:i]
    if not atom:
        raise ValueError("empty term in %r" % s)
    try:
        return int(atom), i
    except ValueError:
        return atom, i


def render_term(term) -> str:
    """Inverse of parse_term."""
    if isinstance(term, tuple):
        functor, args = term
        return "%s(%s)" % (functor, ",".join(render_term(a) for a in args))
    return str(term)


def split_atom(atom: str) -> tuple[str, list[str]]:
    """Split a rendered atom into functor and top-level argument strings.

    ``happens(cross(a,b),3)`` -> ("happens", ["cross(a,b)", "3"]).
    """
    atom = atom.strip()
    if not atom.endswith(")"):
        return atom, []
    i = atom.index("(")
    functor = atom[:i]
    args = []
    depth = 0
    start = i + 1
    for j in range(i + 1, len(atom) - 1):
        c = atom[j]
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif c == "," and depth == 0:
            args.append(atom[start:j])
            start = j + 1
    args.append(atom[start:len(atom) - 1])
    return functor, args
