"""Ternary simulation and responsibility-ordered refinement of unknown inputs.

Netlists are JSON::

    {"nodes": [{"name": "a", "type": "INPUT"},
               {"name": "g", "type": "AND", "inputs": ["a", "b"]},
               {"name": "r", "type": "LATCH", "inputs": ["g"], "init": "X"}],
     "outputs": ["g"]}

Gate types: INPUT, AND, OR, NAND, NOR, XOR (two or more inputs), NOT, BUF, MUX
(``[select, d0, d1]``), CONST0, CONST1 and LATCH. Latches must be unrolled into
time frames with :func:`unroll` before simulation.

Responsibility scores come from a "knownness" causal model: one binary variable
per X-input saying whether the input is known, all unknown in the context, and an
outcome ``OUTX`` that is 1 when the output stays X for some Boolean assignment of
the known inputs.
"""

from __future__ import annotations

import heapq
import json
import random
from array import array
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from ._backend import kernels as _default_kernels
from ._pykernels import (G_AND, G_BUF, G_CONST0, G_CONST1, G_INPUT, G_MUX, G_NAND, G_NOR, G_NOT, G_OR,
                         G_XOR, TX)
from .cause import _Engine
from .errors import CapExceeded, CircuitError, FormatError, OutputAlreadyDetermined
from .exprs import CausalFormula, Event, Ref
from .model import CausalModel, ExprEquation, FunctionEquation

X = "X"
DEFAULT_STE_CAP = 12
STRATEGIES = ("responsibility", "topo", "random")

_OPS = {"INPUT": G_INPUT, "AND": G_AND, "OR": G_OR, "NOT": G_NOT, "XOR": G_XOR, "MUX": G_MUX,
        "BUF": G_BUF, "NAND": G_NAND, "NOR": G_NOR, "CONST0": G_CONST0, "CONST1": G_CONST1}
_ARITY = {"INPUT": (0, 0), "CONST0": (0, 0), "CONST1": (0, 0), "NOT": (1, 1), "BUF": (1, 1),
          "MUX": (3, 3), "LATCH": (1, 1), "AND": (2, None), "OR": (2, None), "NAND": (2, None),
          "NOR": (2, None), "XOR": (2, None)}


def _to_t(v) -> int:
    if v in (0, 1) and not isinstance(v, str):
        return int(v)
    if isinstance(v, str) and v.strip() in ("0", "1"):
        return int(v)
    if isinstance(v, str) and v.strip().upper() == "X":
        return TX
    raise CircuitError(f"ternary value must be 0, 1 or X, not {v!r}")


def _from_t(t: int):
    return X if t == TX else t


def _check_nodes(raw) -> list[dict]:
    if not isinstance(raw, list):
        raise CircuitError("'nodes' must be a list")
    out, seen = [], set()
    for nd in raw:
        if not isinstance(nd, Mapping) or "name" not in nd or "type" not in nd:
            raise CircuitError(f"node {nd!r} needs 'name' and 'type'")
        name, typ = str(nd["name"]), str(nd["type"]).upper()
        if typ not in _ARITY:
            raise CircuitError(f"node {name!r}: unknown gate type {nd['type']!r}")
        if name in seen:
            raise CircuitError(f"duplicate node name {name!r}")
        seen.add(name)
        ins = [str(i) for i in nd.get("inputs", [])]
        lo, hi = _ARITY[typ]
        if len(ins) < lo or (hi is not None and len(ins) > hi):
            want = f"{lo}" if lo == hi else f"at least {lo}"
            raise CircuitError(f"node {name!r}: {typ} takes {want} inputs, got {len(ins)}")
        d = {"name": name, "type": typ, "inputs": ins}
        if typ == "LATCH":
            d["init"] = _from_t(_to_t(nd.get("init", X)))
        out.append(d)
    for d in out:
        for i in d["inputs"]:
            if i not in seen:
                raise CircuitError(f"node {d['name']!r} reads undeclared node {i!r}")
    return out


class TernaryCircuit:
    """Combinational gate DAG with designated outputs."""

    def __init__(self, nodes: Sequence[Mapping], outputs: Sequence[str]):
        nodes = _check_nodes(list(nodes))
        if any(d["type"] == "LATCH" for d in nodes):
            raise CircuitError("netlist has latches; unroll it into time frames first")
        by = {d["name"]: d for d in nodes}
        self.outputs = tuple(str(o) for o in outputs)
        for o in self.outputs:
            if o not in by:
                raise CircuitError(f"output {o!r} is not a node")
        rank = {d["name"]: k for k, d in enumerate(nodes)}
        indeg = {d["name"]: len(d["inputs"]) for d in nodes}
        users: dict[str, list[str]] = {d["name"]: [] for d in nodes}
        for d in nodes:
            for i in d["inputs"]:
                users[i].append(d["name"])
        heap = [(rank[n], n) for n, k in indeg.items() if k == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            _, n = heapq.heappop(heap)
            order.append(n)
            for u in users[n]:
                indeg[u] -= 1
                if indeg[u] == 0:
                    heapq.heappush(heap, (rank[u], u))
        if len(order) != len(nodes):
            stuck = sorted((n for n in indeg if indeg[n] > 0), key=rank.get)
            raise CircuitError(f"combinational cycle through {stuck}")
        self.nodes = tuple(by[n] for n in order)
        self.names = tuple(order)
        self.index = {n: k for k, n in enumerate(order)}
        self.inputs = tuple(n for n in order if by[n]["type"] == "INPUT")
        ops, istart, icount, flat = [], [], [], []
        for d in self.nodes:
            ops.append(_OPS[d["type"]])
            istart.append(len(flat))
            icount.append(len(d["inputs"]))
            flat.extend(self.index[i] for i in d["inputs"])
        self._arrays = (array("i", ops), array("i", istart), array("i", icount), array("i", flat or [0]))

    @classmethod
    def from_dict(cls, d: Mapping) -> "TernaryCircuit":
        if "nodes" not in d:
            raise CircuitError("netlist is missing 'nodes'")
        return cls(d["nodes"], d.get("outputs", []))

    def to_dict(self) -> dict:
        return {"nodes": [dict(n) for n in self.nodes], "outputs": list(self.outputs)}

    def fanin(self, node: str) -> list[str]:
        return list(self.nodes[self.index[node]]["inputs"])

    def cone_inputs(self, node: str) -> list[str]:
        """INPUT nodes in the transitive fan-in of ``node``, in circuit order."""
        seen, stack = set(), [node]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(self.fanin(n))
        return [n for n in self.inputs if n in seen]

    def complete(self, a: Mapping[str, Any]) -> dict[str, Any]:
        """Total assignment: listed inputs as given, every other input X."""
        for k in a:
            if k not in self.index or self.nodes[self.index[k]]["type"] != "INPUT":
                raise CircuitError(f"{k!r} is not an input of the circuit")
        return {n: _from_t(_to_t(a.get(n, X))) for n in self.inputs}

    def _base(self, a: Mapping[str, Any]) -> array:
        vals = array("i", [TX] * len(self.names))
        for n, v in a.items():
            vals[self.index[n]] = _to_t(v)
        return vals


def netlist_from_dict(d: Mapping, steps: int | None = None) -> tuple[TernaryCircuit, dict[str, Any]]:
    """Circuit plus latch initial values; sequential netlists are unrolled ``steps`` frames (default 1)."""
    if not isinstance(d, Mapping) or "nodes" not in d:
        raise CircuitError("netlist must be an object with a 'nodes' list")
    nodes = _check_nodes(d["nodes"])
    if steps is None and not any(n["type"] == "LATCH" for n in nodes):
        return TernaryCircuit(nodes, d.get("outputs", [])), {}
    return unroll(d, steps or 1)


def unroll(d: Mapping, steps: int) -> tuple[TernaryCircuit, dict[str, Any]]:
    """Time-frame expansion: node ``n`` at frame ``t`` becomes ``n@t``.

    Inputs get a fresh copy per frame, latches at frame 0 become inputs carrying
    their ``init`` value and later copies buffer the latch input of the previous
    frame. Outputs are taken at the last frame. Returns the combinational circuit
    and the assignment of the frame-0 latch inputs.
    """
    if steps < 1:
        raise CircuitError("unroll bound must be at least 1")
    nodes = _check_nodes(d["nodes"])
    out, init = [], {}
    for t in range(steps):
        for nd in nodes:
            name = f"{nd['name']}@{t}"
            if nd["type"] == "LATCH":
                if t == 0:
                    out.append({"name": name, "type": "INPUT"})
                    init[name] = nd["init"]
                else:
                    out.append({"name": name, "type": "BUF", "inputs": [f"{nd['inputs'][0]}@{t - 1}"]})
            else:
                out.append({"name": name, "type": nd["type"], "inputs": [f"{i}@{t}" for i in nd["inputs"]]})
    outputs = [f"{o}@{steps - 1}" for o in d.get("outputs", [])]
    return TernaryCircuit(out, outputs), init


def load_netlist(path: str | Path, steps: int | None = None) -> tuple[TernaryCircuit, dict[str, Any]]:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, path=path, line=e.lineno, col=e.colno) from None
    try:
        return netlist_from_dict(data, steps)
    except CircuitError as e:
        raise FormatError(str(e), path=path) from None


def ternary_eval(c: TernaryCircuit, a: Mapping[str, Any], kernels=None) -> dict[str, Any]:
    """Value of every node in {0, 1, X}; inputs missing from ``a`` are X."""
    k = kernels or _default_kernels
    vals = c._base(c.complete(a))
    k.ternary_eval(*c._arrays, vals)
    return {n: _from_t(vals[i]) for i, n in enumerate(c.names)}


# ------------------------------------------------------------ responsibility


class _Knownness:
    """Memoized "is ``out`` determined once these inputs are known" oracle."""

    def __init__(self, c: TernaryCircuit, a: Mapping[str, Any], output: str, kernels=None):
        self.c = c
        self.k = kernels or _default_kernels
        self.base = c._base(a)
        self.out = c.index[output]
        self.scratch = array("i", [0] * len(c.names))
        self.memo: dict[frozenset, bool] = {}

    def determined(self, known: Sequence[str]) -> bool:
        key = frozenset(known)
        hit = self.memo.get(key)
        if hit is None:
            idx = array("i", sorted(self.c.index[n] for n in key) or [0])
            hit = bool(self.k.ternary_determined(*self.c._arrays, self.base, idx, len(key), self.out, self.scratch))
            self.memo[key] = hit
        return hit


def knownness_model(c: TernaryCircuit, a: Mapping[str, Any], output: str, x_inputs: Sequence[str],
                    kernels=None) -> tuple[CausalModel, dict[str, str]]:
    """Causal model with ``K_<n>`` per X-input ``n`` and outcome ``OUTX``."""
    oracle = _Knownness(c, a, output, kernels)
    var = {n: f"K{j}" for j, n in enumerate(x_inputs)}
    exo = {f"U{j}": [0, 1] for j in range(len(x_inputs))}
    endo = {var[n]: [0, 1] for n in x_inputs}
    endo["OUTX"] = [0, 1]
    eqs = {var[n]: ExprEquation(Ref(f"U{j}")) for j, n in enumerate(x_inputs)}
    names = tuple(var[n] for n in x_inputs)

    def outx(env):
        return int(not oracle.determined([n for n, v in zip(x_inputs, names) if env[v]]))

    eqs["OUTX"] = FunctionEquation(names, outx, "output-is-X")
    ctx = {u: 0 for u in exo}
    return CausalModel(exo, endo, eqs, {"unknown": ctx}), var


def _x_cone(c: TernaryCircuit, a: Mapping[str, Any], output: str) -> list[str]:
    return [n for n in c.cone_inputs(output) if a[n] == X]


def structural_score(c: TernaryCircuit, a: Mapping[str, Any], output: str, node: str) -> Fraction:
    """``1/|S|`` where ``S`` is the X-input support of the immediate post-dominator of
    ``node`` on its paths to ``output``."""
    users: dict[str, list[str]] = {n: [] for n in c.names}
    for d in c.nodes:
        for i in d["inputs"]:
            users[i].append(d["name"])
    on_path = set()
    stack = [output]
    while stack:
        n = stack.pop()
        if n not in on_path:
            on_path.add(n)
            stack.extend(c.fanin(n))
    # post-dominators computed over the sub-DAG between node and output, reverse topological
    pdom: dict[str, set[str]] = {}
    for n in reversed(c.names):
        if n not in on_path:
            continue
        if n == output:
            pdom[n] = {n}
            continue
        succ = [u for u in users[n] if u in pdom]
        if not succ:
            continue
        common = set.intersection(*(pdom[u] for u in succ))
        pdom[n] = common | {n}
    cands = [d for d in pdom.get(node, {output}) if d != node] or [output]
    ipdom = min(cands, key=c.index.__getitem__)
    support = _x_cone(c, a, ipdom)
    return Fraction(1, max(1, len(support)))


@dataclass(frozen=True)
class ScoredInput:
    node: str
    score: Fraction
    exact: bool


def responsibility_order(c: TernaryCircuit, a: Mapping[str, Any], output: str, *,
                         cap: int | None = None, fallback: bool = True, kernels=None) -> list[ScoredInput]:
    """X-inputs with positive responsibility for ``output`` being X, best first.

    Inputs whose knowledge can never help determine the output score 0 and are
    left out. With more than ``cap`` X-inputs in the output's cone the exact search
    is replaced by :func:`structural_score` (or ``CapExceeded`` without fallback).
    """
    if output not in c.index:
        raise CircuitError(f"{output!r} is not a node")
    a = c.complete(a)
    if ternary_eval(c, a, kernels)[output] != X:
        raise OutputAlreadyDetermined(f"output {output!r} is already determined under this assignment")
    xs = _x_cone(c, a, output)
    cap = DEFAULT_STE_CAP if cap is None else cap
    if len(xs) > cap:
        if not fallback:
            raise CapExceeded("knownness model", len(xs), cap)
        scored = [ScoredInput(n, structural_score(c, a, output, n), False) for n in xs]
    else:
        model, var = knownness_model(c, a, output, xs, kernels)
        eng = _Engine(model, "unknown", CausalFormula(Event("OUTX", 1)))
        scored = []
        for n in xs:
            rep = eng.report(((var[n], 0),))
            if rep.is_cause:
                scored.append(ScoredInput(n, rep.responsibility, True))
    scored.sort(key=lambda s: (-s.score, s.node))
    return scored


# ---------------------------------------------------------------- refinement


@dataclass(frozen=True)
class RefinementStep:
    node: str
    branch: tuple[tuple[str, int], ...]
    values: tuple[int, int] = (0, 1)


@dataclass(frozen=True)
class RefinementTrace:
    output: str
    strategy: str
    steps: tuple[RefinementStep, ...]
    leaves: tuple[tuple[tuple[tuple[str, int], ...], int], ...]

    @property
    def instantiations(self) -> int:
        return len(self.steps)

    @property
    def status(self) -> dict[str, str]:
        return {self.output: "determined"}


def refine(c: TernaryCircuit, a: Mapping[str, Any], output: str, strategy: str = "responsibility",
           *, seed: int = 0, cap: int | None = None, kernels=None) -> RefinementTrace:
    """Case-split X-inputs until ``output`` is 0 or 1 on every branch.

    Each split picks one X-input of the output's cone: the top of
    :func:`responsibility_order`, the first in circuit order (``topo``) or a seeded
    random one. Branches are explored 0 before 1, depth first.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    if output not in c.index:
        raise CircuitError(f"{output!r} is not a node")
    start = c.complete(a)
    if ternary_eval(c, start, kernels)[output] != X:
        raise OutputAlreadyDetermined(f"output {output!r} is already determined under this assignment")
    rng = random.Random(seed)
    steps: list[RefinementStep] = []
    leaves = []

    def rec(assign: dict, branch: tuple):
        v = ternary_eval(c, assign, kernels)[output]
        if v != X:
            leaves.append((branch, v))
            return
        if strategy == "responsibility":
            order = responsibility_order(c, assign, output, cap=cap, kernels=kernels)
            node = order[0].node
        elif strategy == "topo":
            node = _x_cone(c, assign, output)[0]
        else:
            node = rng.choice(_x_cone(c, assign, output))
        steps.append(RefinementStep(node, branch))
        for b in (0, 1):
            rec({**assign, node: b}, branch + ((node, b),))

    rec(start, ())
    return RefinementTrace(output, strategy, tuple(steps), tuple(leaves))


@dataclass(frozen=True)
class BenchRow:
    circuit: int
    x_inputs: int
    counts: dict[str, int]


def benchmark(seed: int, count: int, n_inputs: int = 8, kernels=None) -> tuple[list[BenchRow], dict[str, Fraction]]:
    """Instantiation counts of every strategy on ``count`` seeded random circuits."""
    from .generate import random_circuit

    rng = random.Random(seed)
    rows = []
    for k in range(count):
        c, a = random_circuit(rng, n_inputs)
        out = c.outputs[0]
        counts = {s: refine(c, a, out, s, seed=seed * 1000 + k, kernels=kernels).instantiations
                  for s in STRATEGIES}
        rows.append(BenchRow(k, len(_x_cone(c, c.complete(a), out)), counts))
    means = {s: Fraction(sum(r.counts[s] for r in rows), max(1, len(rows))) for s in STRATEGIES}
    return rows, means
