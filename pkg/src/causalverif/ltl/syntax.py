"""LTL syntax trees, parser and printer.

Precedence, tightest first: unary (``!``, ``X``, ``F``, ``G``), ``U``, ``&``, ``|``,
``->``. ``U`` and ``->`` associate to the right, ``&`` and ``|`` to the left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from ..errors import LtlSyntaxError, UnknownAtom


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Next:
    arg: "Formula"


@dataclass(frozen=True)
class Eventually:
    arg: "Formula"


@dataclass(frozen=True)
class Always:
    arg: "Formula"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"


Formula = Atom | Bool | Not | And | Or | Implies | Next | Eventually | Always | Until

TRUE = Bool(True)
FALSE = Bool(False)

UNARY = (Not, Next, Eventually, Always)
BINARY = (And, Or, Implies, Until)


def children(f: Formula) -> tuple:
    if isinstance(f, UNARY):
        return (f.arg,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    return ()


def rebuild(f: Formula, kids: tuple) -> Formula:
    if isinstance(f, UNARY):
        return type(f)(kids[0])
    if isinstance(f, BINARY):
        return type(f)(kids[0], kids[1])
    return f


def atoms(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    out: set[str] = set()
    for c in children(f):
        out |= atoms(c)
    return out


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in children(f))


def subformulas(f: Formula) -> list[Formula]:
    """Distinct subformulas in post-order (children before parents)."""
    seen: dict[Formula, None] = {}

    def walk(g):
        for c in children(g):
            walk(c)
        seen.setdefault(g)

    walk(f)
    return list(seen)


def occurrences(f: Formula) -> Iterator[tuple[tuple[int, ...], Formula, int]]:
    """Pre-order subformula occurrences as ``(path, subformula, polarity)``.

    Polarity is +1 or -1; the left operand of ``->`` and the operand of ``!`` flip it.
    """

    def walk(g, path, pol):
        yield path, g, pol
        if isinstance(g, Not):
            yield from walk(g.arg, path + (0,), -pol)
        elif isinstance(g, Implies):
            yield from walk(g.left, path + (0,), -pol)
            yield from walk(g.right, path + (1,), pol)
        else:
            for i, c in enumerate(children(g)):
                yield from walk(c, path + (i,), pol)

    yield from walk(f, (), 1)


def replace_at(f: Formula, path: tuple[int, ...], new: Formula) -> Formula:
    if not path:
        return new
    kids = list(children(f))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return rebuild(f, tuple(kids))


# ----------------------------------------------------------------------- parser

_TOKEN = re.compile(r"\s*(?:(?P<op>->|=>|&&|\|\||[!~&|()])|(?P<word>[A-Za-z_][A-Za-z0-9_.@]*)|(?P<bad>\S))")
_UNARY_KW = {"X": Next, "F": Eventually, "G": Always}


def _tokens(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        pos = m.end()
        if m.group("bad"):
            raise LtlSyntaxError(f"unexpected character {m.group('bad')!r}", text=text, pos=m.start("bad"))
        if m.group("op"):
            op = {"=>": "->", "&&": "&", "||": "|", "~": "!"}.get(m.group("op"), m.group("op"))
            out.append(("op", op, m.start("op")))
        else:
            w = m.group("word")
            kind = "kw" if w in ("X", "F", "G", "U", "true", "false") else "atom"
            out.append((kind, w, m.start("word")))
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, text):
        k, t, _ = self.toks[self.i]
        if k in ("op", "kw") and t == text:
            self.i += 1
            return True
        return False

    def error(self, msg, expected):
        k, t, pos = self.peek()
        found = "end of input" if k == "end" else repr(t)
        raise LtlSyntaxError(f"{msg} (found {found})", text=self.text, pos=pos, expected=expected)

    def implies(self):
        left = self.disj()
        if self.take("->"):
            return Implies(left, self.implies())
        return left

    def disj(self):
        f = self.conj()
        while self.take("|"):
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.until()
        while self.take("&"):
            f = And(f, self.until())
        return f

    def until(self):
        left = self.unary()
        if self.take("U"):
            return Until(left, self.until())
        return left

    def unary(self):
        if self.take("!"):
            return Not(self.unary())
        k, t, _ = self.peek()
        if k == "kw" and t in _UNARY_KW:
            self.i += 1
            return _UNARY_KW[t](self.unary())
        return self.primary()

    def primary(self):
        k, t, _ = self.peek()
        if k == "atom":
            self.i += 1
            return Atom(t)
        if k == "kw" and t in ("true", "false"):
            self.i += 1
            return Bool(t == "true")
        if self.take("("):
            f = self.implies()
            if not self.take(")"):
                self.error("unbalanced parenthesis", ("')'",))
            return f
        self.error("missing operand", ("an atom", "'true'", "'false'", "'('", "a unary operator"))


def parse_ltl(text: str, alphabet: Iterable[str] | None = None) -> Formula:
    """Parse ``text``; with ``alphabet`` given, reject atoms outside it."""
    p = _Parser(text)
    f = p.implies()
    if p.peek()[0] != "end":
        p.error("unexpected trailing input", ("an operator", "end of input"))
    if alphabet is not None:
        unknown = atoms(f) - set(alphabet)
        if unknown:
            raise UnknownAtom(unknown)
    return f


# ---------------------------------------------------------------------- printer

_PREC = {Implies: 1, Or: 2, And: 3, Until: 4}
_SYM = {Implies: "->", Or: "|", And: "&", Until: "U"}
_USYM = {Not: "!", Next: "X ", Eventually: "F ", Always: "G "}


def _prec(f) -> int:
    if isinstance(f, BINARY):
        return _PREC[type(f)]
    if isinstance(f, UNARY):
        return 5
    return 6


def to_str(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bool):
        return "true" if f.value else "false"
    if isinstance(f, UNARY):
        inner = to_str(f.arg)
        if _prec(f.arg) < 5:
            inner = f"({inner})"
            return _USYM[type(f)].strip() + inner
        return _USYM[type(f)] + inner
    p = _PREC[type(f)]
    right_assoc = isinstance(f, (Implies, Until))
    ls, rs = to_str(f.left), to_str(f.right)
    lp, rp = _prec(f.left), _prec(f.right)
    if lp < p or (lp == p and right_assoc):
        ls = f"({ls})"
    if rp < p or (rp == p and not right_assoc):
        rs = f"({rs})"
    return f"{ls} {_SYM[type(f)]} {rs}"
