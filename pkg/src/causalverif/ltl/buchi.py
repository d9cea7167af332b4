"""Explicit-state LTL model checking.

The negated specification is rewritten into the core connectives (atoms, ``true``,
``!``, ``&``, ``X``, ``U``). Tableau states are truth assignments to the elementary
subformulas (atoms, ``X``- and ``U``-formulas) that respect the local expansion
law of ``U``; they are generated on demand for each Kripke label. The product
with the structure is degeneralized with a counter over the ``U`` acceptance sets
and searched for an accepting lasso by nested depth-first search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..errors import AlphabetMismatch
from .kripke import KripkeStructure
from .syntax import (Always, And, Atom, Bool, Eventually, Formula, Implies, Next, Not, Or, Until,
                     atoms, subformulas)
from .trace import Trace

TRUE = Bool(True)


def _neg(f):
    return f.arg if isinstance(f, Not) else Not(f)


def to_core(f: Formula) -> Formula:
    if isinstance(f, (Atom, Bool)):
        if isinstance(f, Bool) and not f.value:
            return Not(TRUE)
        return f
    if isinstance(f, Not):
        return _neg(to_core(f.arg))
    if isinstance(f, And):
        return And(to_core(f.left), to_core(f.right))
    if isinstance(f, Or):
        return _neg(And(_neg(to_core(f.left)), _neg(to_core(f.right))))
    if isinstance(f, Implies):
        return _neg(And(to_core(f.left), _neg(to_core(f.right))))
    if isinstance(f, Next):
        return Next(to_core(f.arg))
    if isinstance(f, Eventually):
        return Until(TRUE, to_core(f.arg))
    if isinstance(f, Always):
        return _neg(Until(TRUE, _neg(to_core(f.arg))))
    if isinstance(f, Until):
        return Until(to_core(f.left), to_core(f.right))
    raise TypeError(f)


@dataclass(frozen=True)
class Verdict:
    holds: bool
    counterexample: Trace | None = None
    product_states: int = 0
    states: tuple[str, ...] | None = None  # Kripke states along the counterexample


class _Tableau:
    def __init__(self, root: Formula):
        self.root = root
        self.closure = subformulas(root)
        self.cidx = {g: k for k, g in enumerate(self.closure)}
        self.atoms = [g for g in self.closure if isinstance(g, Atom)]
        self.free = [g for g in self.closure if isinstance(g, (Next, Until))]
        self.nexts = [g for g in self.closure if isinstance(g, Next)]
        self.untils = [g for g in self.closure if isinstance(g, Until)]
        self._by_label: dict[frozenset, list[tuple[int, int]]] = {}

    def _truth(self, elem: set) -> int:
        bits = 0
        for k, g in enumerate(self.closure):
            if isinstance(g, (Atom, Next, Until)):
                v = g in elem
            elif isinstance(g, Bool):
                v = g.value
            elif isinstance(g, Not):
                v = not (bits >> self.cidx[g.arg]) & 1
            else:  # And
                v = bool((bits >> self.cidx[g.left]) & 1) and bool((bits >> self.cidx[g.right]) & 1)
            if v:
                bits |= 1 << k
        return bits

    def t(self, truth: int, g: Formula) -> bool:
        return bool((truth >> self.cidx[g]) & 1)

    def states_for(self, label: frozenset) -> list[tuple[int, int]]:
        """Consistent tableau states ``(truth bits, acceptance bits)`` with these atoms true."""
        key = frozenset(a for a in self.atoms if a.name in label)
        hit = self._by_label.get(key)
        if hit is not None:
            return hit
        out = []
        for combo in itertools.product((False, True), repeat=len(self.free)):
            elem = set(key) | {g for g, on in zip(self.free, combo) if on}
            tr = self._truth(elem)
            ok = True
            for u in self.untils:
                a, b = self.t(tr, u.left), self.t(tr, u.right)
                if b and not self.t(tr, u):
                    ok = False
                elif not a and not b and self.t(tr, u):
                    ok = False
                if not ok:
                    break
            if not ok:
                continue
            acc = 0
            for j, u in enumerate(self.untils):
                if not self.t(tr, u) or self.t(tr, u.right):
                    acc |= 1 << j
            out.append((tr, acc))
        self._by_label[key] = out
        return out

    def step_ok(self, s: int, t: int) -> bool:
        for x in self.nexts:
            if self.t(s, x) != self.t(t, x.arg):
                return False
        for u in self.untils:
            if self.t(s, u.left) and not self.t(s, u.right) and self.t(s, u) != self.t(t, u):
                return False
        return True


def check_structure(k: KripkeStructure, spec: Formula) -> Verdict:
    """Does every infinite path from every initial state of ``k`` satisfy ``spec``?"""
    extra = atoms(spec) - set(k.alphabet)
    if extra:
        raise AlphabetMismatch(extra)
    tab = _Tableau(to_core(Not(spec)))
    m = max(1, len(tab.untils))
    full = (1 << m) - 1 if not tab.untils else None

    def acc_bits(a):
        return full if full is not None else a

    def succs(node):
        ks, (s, sacc), i = node
        j = (i + 1) % m if (acc_bits(sacc) >> i) & 1 else i
        for k2 in k.successors(ks):
            for st in tab.states_for(k.labels[k2]):
                if tab.step_ok(s, st[0]):
                    yield (k2, st, j)

    def accepting(node):
        _, (_, sacc), i = node
        return i == 0 and acc_bits(sacc) & 1

    roots = []
    for k0 in k.initial:
        for st in tab.states_for(k.labels[k0]):
            if tab.t(st[0], tab.root):
                roots.append((k0, st, 0))

    visited: set = set()
    flagged: set = set()
    for root in roots:
        if root in visited:
            continue
        visited.add(root)
        path = [root]
        on_path = {root: 0}
        iters = [succs(root)]
        while iters:
            nxt = next(iters[-1], None)
            if nxt is not None:
                if nxt not in visited:
                    visited.add(nxt)
                    on_path[nxt] = len(path)
                    path.append(nxt)
                    iters.append(succs(nxt))
                continue
            node = path[-1]
            if accepting(node):
                loop = _inner(node, succs, on_path, flagged)
                if loop is not None:
                    trace, states = _lasso(k, path, on_path, loop)
                    return Verdict(False, trace, len(visited), states)
            iters.pop()
            path.pop()
            del on_path[node]
    return Verdict(True, None, len(visited))


def _inner(seed, succs, on_path, flagged):
    if seed in flagged:
        return None
    flagged.add(seed)
    path = [seed]
    iters = [succs(seed)]
    while iters:
        nxt = next(iters[-1], None)
        if nxt is None:
            iters.pop()
            path.pop()
            continue
        if nxt in on_path:
            return path, nxt
        if nxt not in flagged:
            flagged.add(nxt)
            path.append(nxt)
            iters.append(succs(nxt))
    return None


def _lasso(k: KripkeStructure, outer, on_path, loop) -> tuple[Trace, tuple[str, ...]]:
    inner_path, target = loop
    start = on_path[target]
    seq = outer + inner_path[1:]
    rows = [tuple(int(a in k.labels[node[0]]) for a in k.alphabet) for node in seq]
    return Trace(k.alphabet, tuple(rows), start), tuple(node[0] for node in seq)
