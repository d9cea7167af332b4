"""Structural-equation expressions and causal formulas: syntax trees, parsers, printers.

Equation grammar (lowest precedence first)::

    expr  := 'if' expr 'then' expr 'else' expr | or
    or    := and (('|' | '||' | 'or') and)*
    and   := not (('&' | '&&' | 'and') not)*
    not   := ('!' | '~' | 'not') not | cmp
    cmp   := sum (('==' | '=' | '!=' | '<' | '<=' | '>' | '>=') sum)?
    sum   := prod (('+' | '-') prod)*
    prod  := unary ('*' unary)*
    unary := '-' unary | atom
    atom  := INT | 'quoted' | "quoted" | 'true' | 'false' | IDENT | '(' expr ')'

Identifiers are variable references; symbolic constants must be quoted.
Comparisons and Boolean connectives produce the integers 0/1.

Causal formula grammar::

    formula := ('[' assign (',' assign)* ']')? body
    assign  := IDENT ('<-' | '=') value
    body    := Boolean combination (with !, &, |, parentheses) of IDENT ('=' | '!=') value

Values in causal formulas are bare tokens matched against the variable's domain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Mapping

from .errors import FormatError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<str>'[^']*'|"[^"]*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.@]*)
  | (?P<op><-|->|==|!=|<=|>=|&&|\|\||[!~&|=<>+\-*()\[\],])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"if", "then", "else", "true", "false", "and", "or", "not"}


@dataclass(frozen=True)
class Token:
    kind: str  # int | str | ident | op | kw | end
    text: str
    pos: int


def tokenize(text: str, *, arrows: bool = False) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormatError(f"unexpected character {text[pos]!r} at column {pos + 1}")
        kind = m.lastgroup
        tok = m.group()
        if kind == "op" and tok == "<-" and not arrows:
            tokens.append(Token("op", "<", pos))
            tokens.append(Token("op", "-", pos + 1))
        elif kind == "ident" and tok in _KEYWORDS:
            tokens.append(Token("kw", tok, pos))
        elif kind != "ws":
            tokens.append(Token(kind, tok, pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Cursor:
    def __init__(self, text, tokens):
        self.text = text
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def accept(self, *texts) -> Token | None:
        if self.tok.kind in ("op", "kw") and self.tok.text in texts:
            return self.next()
        return None

    def expect(self, *texts) -> Token:
        t = self.accept(*texts)
        if t is None:
            self.fail("expected " + " or ".join(repr(x) for x in texts))
        return t

    def fail(self, msg):
        t = self.tok
        found = t.text if t.kind != "end" else "end of input"
        raise FormatError(f"{msg} at column {t.pos + 1} (found {found!r}) in {self.text!r}",
                          line=1, col=t.pos + 1)


# --------------------------------------------------------------------------- equations


@dataclass(frozen=True)
class Const:
    value: Any


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # '!' or '-'
    arg: Any


@dataclass(frozen=True)
class Binary:
    op: str
    left: Any
    right: Any


@dataclass(frozen=True)
class Ite:
    cond: Any
    then: Any
    orelse: Any


Expr = Const | Ref | Unary | Binary | Ite

_CMP = ("==", "=", "!=", "<=", ">=", "<", ">")


def parse_expr(text: str) -> Expr:
    cur = _Cursor(text, tokenize(text))
    e = _p_expr(cur)
    if cur.tok.kind != "end":
        cur.fail("trailing input")
    return e


def _p_expr(cur):
    if cur.accept("if"):
        c = _p_expr(cur)
        cur.expect("then")
        a = _p_expr(cur)
        cur.expect("else")
        b = _p_expr(cur)
        return Ite(c, a, b)
    return _p_or(cur)


def _p_or(cur):
    e = _p_and(cur)
    while cur.accept("|", "||", "or"):
        e = Binary("|", e, _p_and(cur))
    return e


def _p_and(cur):
    e = _p_not(cur)
    while cur.accept("&", "&&", "and"):
        e = Binary("&", e, _p_not(cur))
    return e


def _p_not(cur):
    if cur.accept("!", "~", "not"):
        return Unary("!", _p_not(cur))
    return _p_cmp(cur)


def _p_cmp(cur):
    e = _p_sum(cur)
    t = cur.accept(*_CMP)
    if t is not None:
        op = "==" if t.text == "=" else t.text
        e = Binary(op, e, _p_sum(cur))
    return e


def _p_sum(cur):
    e = _p_prod(cur)
    while True:
        t = cur.accept("+", "-")
        if t is None:
            return e
        e = Binary(t.text, e, _p_prod(cur))


def _p_prod(cur):
    e = _p_unary(cur)
    while cur.accept("*"):
        e = Binary("*", e, _p_unary(cur))
    return e


def _p_unary(cur):
    if cur.accept("-"):
        return Unary("-", _p_unary(cur))
    return _p_atom(cur)


def _p_atom(cur):
    t = cur.tok
    if t.kind == "int":
        cur.next()
        return Const(int(t.text))
    if t.kind == "str":
        cur.next()
        return Const(t.text[1:-1])
    if t.kind == "kw" and t.text in ("true", "false"):
        cur.next()
        return Const(1 if t.text == "true" else 0)
    if t.kind == "ident":
        cur.next()
        return Ref(t.text)
    if cur.accept("("):
        e = _p_expr(cur)
        cur.expect(")")
        return e
    cur.fail("expected an operand")


def expr_refs(e: Expr) -> list[str]:
    """Variable names mentioned by ``e`` in first-occurrence order."""
    seen: dict[str, None] = {}

    def walk(x):
        if isinstance(x, Ref):
            seen.setdefault(x.name)
        elif isinstance(x, Unary):
            walk(x.arg)
        elif isinstance(x, Binary):
            walk(x.left)
            walk(x.right)
        elif isinstance(x, Ite):
            walk(x.cond)
            walk(x.then)
            walk(x.orelse)

    walk(e)
    return list(seen)


def eval_expr(e: Expr, env: Mapping[str, Any]) -> Any:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Ref):
        return env[e.name]
    if isinstance(e, Unary):
        v = eval_expr(e.arg, env)
        return int(not v) if e.op == "!" else -v
    if isinstance(e, Ite):
        return eval_expr(e.then if eval_expr(e.cond, env) else e.orelse, env)
    op = e.op
    if op == "&":
        return int(bool(eval_expr(e.left, env)) and bool(eval_expr(e.right, env)))
    if op == "|":
        return int(bool(eval_expr(e.left, env)) or bool(eval_expr(e.right, env)))
    a = eval_expr(e.left, env)
    b = eval_expr(e.right, env)
    if op == "==":
        return int(a == b)
    if op == "!=":
        return int(a != b)
    if op == "<":
        return int(a < b)
    if op == "<=":
        return int(a <= b)
    if op == ">":
        return int(a > b)
    if op == ">=":
        return int(a >= b)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    raise ValueError(f"unknown operator {op}")


_PREC = {"ite": 0, "|": 1, "&": 2, "!": 3, "cmp": 4, "+": 5, "-": 5, "*": 6, "neg": 7, "atom": 8}


def _prec(e) -> int:
    if isinstance(e, Ite):
        return _PREC["ite"]
    if isinstance(e, Unary):
        return _PREC["!"] if e.op == "!" else _PREC["neg"]
    if isinstance(e, Binary):
        return _PREC["cmp"] if e.op in _CMP else _PREC[e.op]
    return _PREC["atom"]


def expr_to_str(e: Expr) -> str:
    if isinstance(e, Const):
        if isinstance(e.value, str):
            return "'" + e.value + "'"
        return str(e.value)
    if isinstance(e, Ref):
        return e.name
    if isinstance(e, Ite):
        return f"if {expr_to_str(e.cond)} then {expr_to_str(e.then)} else {expr_to_str(e.orelse)}"

    def sub(x, min_prec):
        s = expr_to_str(x)
        return f"({s})" if _prec(x) < min_prec else s

    p = _prec(e)
    if isinstance(e, Unary):
        return ("!" if e.op == "!" else "-") + sub(e.arg, p)
    if e.op in _CMP:
        # comparisons are non-associative
        return f"{sub(e.left, p + 1)} {e.op} {sub(e.right, p + 1)}"
    return f"{sub(e.left, p)} {e.op} {sub(e.right, p + 1)}"


# --------------------------------------------------------------------- causal formulas


@dataclass(frozen=True)
class Event:
    """Primitive event ``var = value``; ``value`` is the raw token until resolved."""

    var: str
    value: Any


@dataclass(frozen=True)
class Not:
    arg: Any


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class CausalFormula:
    """A Boolean combination of events under an optional root intervention ``[Y<-y]``."""

    body: Any
    intervention: tuple = ()

    def variables(self) -> list[str]:
        out: dict[str, None] = {}

        def walk(x):
            if isinstance(x, Event):
                out.setdefault(x.var)
            elif isinstance(x, Not):
                walk(x.arg)
            else:
                for a in x.args:
                    walk(a)

        walk(self.body)
        return list(out)

    def satisfied_by(self, assignment: Mapping[str, Any]) -> bool:
        return _eval_body(self.body, assignment)

    def __str__(self) -> str:
        s = body_to_str(self.body)
        if self.intervention:
            prefix = ", ".join(f"{k}<-{v}" for k, v in self.intervention)
            return f"[{prefix}]({s})" if isinstance(self.body, (And, Or)) else f"[{prefix}]{s}"
        return s


def _eval_body(b, assignment) -> bool:
    if isinstance(b, Event):
        return assignment[b.var] == b.value
    if isinstance(b, Not):
        return not _eval_body(b.arg, assignment)
    if isinstance(b, And):
        return all(_eval_body(a, assignment) for a in b.args)
    return any(_eval_body(a, assignment) for a in b.args)


def body_to_str(b) -> str:
    if isinstance(b, Event):
        return f"{b.var}={b.value}"
    if isinstance(b, Not):
        inner = body_to_str(b.arg)
        return f"!{inner}" if isinstance(b.arg, (Event, Not)) else f"!({inner})"
    sep = " & " if isinstance(b, And) else " | "
    parts = []
    for a in b.args:
        s = body_to_str(a)
        parts.append(f"({s})" if isinstance(a, (And, Or)) else s)
    return sep.join(parts)


def _value_token(cur: _Cursor):
    t = cur.tok
    if t.kind == "int":
        cur.next()
        return int(t.text)
    if t.kind == "str":
        cur.next()
        return t.text[1:-1]
    if t.kind in ("ident", "kw"):
        cur.next()
        return t.text
    cur.fail("expected a value")


def parse_formula(text: str) -> CausalFormula:
    cur = _Cursor(text, tokenize(text, arrows=True))
    interv = []
    if cur.accept("["):
        while True:
            t = cur.tok
            if t.kind != "ident":
                cur.fail("expected a variable name")
            cur.next()
            cur.expect("<-", "=")
            interv.append((t.text, _value_token(cur)))
            if cur.accept("]"):
                break
            cur.expect(",")
    body = _f_or(cur)
    if cur.tok.kind != "end":
        cur.fail("trailing input")
    return CausalFormula(body, tuple(interv))


def parse_assignment(text: str) -> list[tuple[str, Any]]:
    """Parse ``X=1, Y=G`` (also accepts ``&`` or ``<-`` as separators/binders)."""
    cur = _Cursor(text, tokenize(text, arrows=True))
    out = []
    while cur.tok.kind != "end":
        t = cur.tok
        if t.kind != "ident":
            cur.fail("expected a variable name")
        cur.next()
        cur.expect("=", "<-")
        out.append((t.text, _value_token(cur)))
        if cur.tok.kind != "end":
            cur.expect(",", "&")
    if not out:
        cur.fail("expected at least one assignment")
    return out


def _f_or(cur):
    args = [_f_and(cur)]
    while cur.accept("|", "||", "or"):
        args.append(_f_and(cur))
    return args[0] if len(args) == 1 else Or(tuple(args))


def _f_and(cur):
    args = [_f_not(cur)]
    while cur.accept("&", "&&", "and"):
        args.append(_f_not(cur))
    return args[0] if len(args) == 1 else And(tuple(args))


def _f_not(cur):
    if cur.accept("!", "~", "not"):
        return Not(_f_not(cur))
    if cur.accept("("):
        b = _f_or(cur)
        cur.expect(")")
        return b
    t = cur.tok
    if t.kind != "ident":
        cur.fail("expected an event 'Var=value'")
    cur.next()
    op = cur.expect("=", "==", "!=")
    ev = Event(t.text, _value_token(cur))
    return Not(ev) if op.text == "!=" else ev
