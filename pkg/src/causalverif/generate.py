"""Seeded generators for random models, structures, formulas, traces and circuits.

Used by the test oracles, the acceptance suite and the ``corpus``/``ste --bench``
commands. Every generator takes a ``random.Random`` so streams are reproducible.
"""

from __future__ import annotations

import random
from typing import Sequence

from .exprs import Binary, Const, Ref, Unary
from .ltl.kripke import KripkeStructure
from .ltl.syntax import (Always, And, Atom, Eventually, Formula, Implies, Next, Not, Or, Until)
from .ltl.trace import Trace, check_trace
from .model import CausalModel, ExprEquation


def _random_bool_expr(rng: random.Random, refs: Sequence[str], depth: int):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.1:
            return Const(rng.randint(0, 1))
        return Ref(rng.choice(refs))
    r = rng.random()
    if r < 0.2:
        return Unary("!", _random_bool_expr(rng, refs, depth - 1))
    op = rng.choice(["&", "|", "!="])
    return Binary(op, _random_bool_expr(rng, refs, depth - 1), _random_bool_expr(rng, refs, depth - 1))


def random_binary_model(rng: random.Random, n_endo: int | None = None, max_parents: int = 3):
    """Acyclic binary model; each endogenous variable reads one private exogenous input
    and up to ``max_parents`` earlier endogenous variables."""
    n = n_endo if n_endo is not None else rng.randint(2, 5)
    endo = [f"V{i}" for i in range(n)]
    exo = {f"U{i}": [0, 1] for i in range(n)}
    eqs = {}
    for i, v in enumerate(endo):
        earlier = rng.sample(endo[:i], min(i, rng.randint(0, max_parents)))
        refs = [f"U{i}"] + earlier
        if not earlier and rng.random() < 0.5:
            eqs[v] = ExprEquation(Ref(f"U{i}"))
        else:
            eqs[v] = ExprEquation(_random_bool_expr(rng, refs, 2))
    ctx = {u: rng.randint(0, 1) for u in exo}
    return CausalModel(exo, {v: [0, 1] for v in endo}, eqs, {"c": ctx})


def random_kripke(rng: random.Random, n_states: int = 4, alphabet: Sequence[str] = ("p", "q"),
                  max_out: int = 2) -> KripkeStructure:
    states = [f"s{i}" for i in range(n_states)]
    edges = []
    for s in states:
        for t in rng.sample(states, rng.randint(1, max_out)):
            edges.append((s, t))
    labels = {s: [a for a in alphabet if rng.random() < 0.5] for s in states}
    initial = [states[0]] if rng.random() < 0.8 else states[:2]
    return KripkeStructure(states, initial, edges, labels, alphabet)


def random_ltl(rng: random.Random, alphabet: Sequence[str], depth: int = 3) -> Formula:
    if depth == 0 or rng.random() < 0.25:
        return Atom(rng.choice(list(alphabet)))
    r = rng.random()
    sub = lambda: random_ltl(rng, alphabet, depth - 1)
    if r < 0.12:
        return Not(sub())
    if r < 0.24:
        return Next(sub())
    if r < 0.38:
        return Eventually(sub())
    if r < 0.52:
        return Always(sub())
    if r < 0.64:
        return Until(sub(), sub())
    if r < 0.76:
        return And(sub(), sub())
    if r < 0.88:
        return Or(sub(), sub())
    return Implies(sub(), sub())


def random_trace(rng: random.Random, signals: Sequence[str], n_cycles: int, lasso: bool | None = None) -> Trace:
    rows = tuple(tuple(rng.randint(0, 1) for _ in signals) for _ in range(n_cycles))
    if lasso is None:
        lasso = rng.random() < 0.3
    loop = rng.randrange(n_cycles) if lasso else None
    return Trace(tuple(signals), rows, loop)


def random_failing_pair(rng: random.Random, max_signals: int = 3, max_cycles: int = 6):
    """A ``(trace, formula)`` pair on which the formula fails."""
    while True:
        k = rng.randint(1, max_signals)
        sigs = ["p", "q", "r"][:k]
        t = random_trace(rng, sigs, rng.randint(1, max_cycles))
        f = random_ltl(rng, sigs, rng.randint(1, 3))
        if not check_trace(t, f):
            return t, f


_GATES2 = ["AND", "OR", "XOR", "NAND", "NOR"]


def random_circuit(rng: random.Random, n_inputs: int = 8, n_gates: int = 12, x_fraction: float = 0.75):
    """Random combinational netlist dict plus an assignment under which the output is X."""
    from .ste import TernaryCircuit, X, ternary_eval

    while True:
        inputs = [f"i{k}" for k in range(n_inputs)]
        nodes = [{"name": n, "type": "INPUT"} for n in inputs]
        names = list(inputs)
        for g in range(n_gates):
            name = f"g{g}"
            r = rng.random()
            recent = names[-6:]
            pick = lambda: rng.choice(recent if rng.random() < 0.6 else names)
            if r < 0.1:
                nodes.append({"name": name, "type": "NOT", "inputs": [pick()]})
            elif r < 0.25:
                a = pick()
                nodes.append({"name": name, "type": "MUX", "inputs": [rng.choice(inputs), a, pick()]})
            else:
                a = pick()
                b = pick()
                while b == a:
                    b = rng.choice(names)
                nodes.append({"name": name, "type": rng.choice(_GATES2), "inputs": [a, b]})
            names.append(name)
        out = names[-1]
        c = TernaryCircuit.from_dict({"nodes": nodes, "outputs": [out]})
        assign = {n: (X if rng.random() < x_fraction else rng.randint(0, 1)) for n in inputs}
        if ternary_eval(c, assign)[out] == X:
            return c, assign
