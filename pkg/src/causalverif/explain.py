"""Causes of an LTL failure on a trace, exact and one-pass, plus a timing diagram.

In exact mode every (signal, cycle) value is a binary variable set by its own
exogenous input and ``FAIL`` is the negation of the formula evaluated on the
modified trace. Loop cycles of a lasso are single variables, so a flip there
applies to every unrolled iteration.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field
from fractions import Fraction

from .cause import DEFAULT_CAP, _Engine
from .errors import CapExceeded, FormulaHolds
from .exprs import CausalFormula, Event, Ref
from .ltl.syntax import (Always, And, Atom, Bool, Eventually, Formula, Implies, Next, Not, Or, Until,
                         atoms, to_str)
from .ltl.trace import Evaluation, Trace, TraceProgram, check_trace
from .model import CausalModel, ExprEquation, FunctionEquation

EXACT = "exact"
APPROX = "approximate"


@dataclass(frozen=True, order=True)
class ExplanationPoint:
    signal: str
    cycle: int
    value: int


@dataclass(frozen=True)
class Explanation:
    formula: Formula
    points: tuple[ExplanationPoint, ...]
    method: str
    responsibilities: dict[ExplanationPoint, Fraction] | None = None
    visits: int = field(default=0, compare=False)
    # exact mode: the other (signal, cycle) flips of each point's minimum witness
    contingencies: dict[ExplanationPoint, tuple[tuple[str, int], ...]] | None = None

    def point_set(self) -> frozenset[tuple[str, int]]:
        return frozenset((p.signal, p.cycle) for p in self.points)


def _failing(t: Trace, phi: Formula) -> None:
    if check_trace(t, phi):
        raise FormulaHolds(f"{to_str(phi)} holds on the trace; there is no failure to explain")


def explain_exact(t: Trace, phi: Formula, *, cap: int | None = None, force: bool = False,
                  kernels=None) -> Explanation:
    """All singleton causes of the failure of ``phi`` on ``t``, with responsibilities."""
    _failing(t, phi)
    n_sig, n_cyc = len(t.signals), t.length
    cap = DEFAULT_CAP if cap is None else cap
    n_vars = n_sig * n_cyc + 1
    if n_vars > cap and not force:
        raise CapExceeded("trace causal model", n_vars, cap)
    used = [s for s in t.signals if s in atoms(phi)]
    name = {(s, c): f"x{j}_{c}" for j, s in enumerate(t.signals) for c in range(n_cyc)}
    exo = {f"u{j}_{c}": [0, 1] for j in range(n_sig) for c in range(n_cyc)}
    endo = {name[(s, c)]: [0, 1] for c in range(n_cyc) for s in t.signals}
    endo["FAIL"] = [0, 1]
    eqs = {name[(s, c)]: ExprEquation(Ref("u" + name[(s, c)][1:])) for (s, c) in name}
    prog = TraceProgram(phi, used, kernels)
    inputs = tuple(name[(s, c)] for c in range(n_cyc) for s in used)

    def fail(env):
        flat = array("i", [env[v] for v in inputs])
        return int(not prog.holds(flat, n_cyc, t.loop_start))

    eqs["FAIL"] = FunctionEquation(inputs, fail, "trace-check")
    ctx = {"u" + name[(s, c)][1:]: t.value(s, c) for (s, c) in name}
    model = CausalModel(exo, endo, eqs, {"actual": ctx})
    eng = _Engine(model, "actual", CausalFormula(Event("FAIL", 1)), kernels)
    points, resp, cont = [], {}, {}
    pair_of = {v: k for k, v in name.items()}
    for s in used:
        for c in range(n_cyc):
            rep = eng.report(((name[(s, c)], t.value(s, c)),))
            if rep.is_cause:
                p = ExplanationPoint(s, c, t.value(s, c))
                points.append(p)
                resp[p] = rep.responsibility
                cont[p] = tuple(pair_of[v] for v in rep.witness.contingency_vars)
    points.sort()
    return Explanation(phi, tuple(points), EXACT, resp, contingencies=cont)


def explain_approx(t: Trace, phi: Formula, kernels=None) -> Explanation:
    """One descent over (subformula, cycle) pairs marking the values behind the failure.

    Each node follows the truth value it actually has. A failing ``G`` descends
    into every failing cycle and a failing ``F`` or ``U`` covers the whole
    obligated range. A fulfilled ``F`` marks every fulfilling cycle, while a
    fulfilled ``U`` points at its earliest fulfilment.
    """
    _failing(t, phi)
    ev = Evaluation(t, phi, kernels)
    val = ev.value
    marked: set[tuple[str, int]] = set()
    seen: set[tuple[Formula, int]] = set()

    def mark(g: Formula, i: int) -> None:
        if (g, i) in seen:
            return
        seen.add((g, i))
        v = val(g, i)
        if isinstance(g, Atom):
            marked.add((g.name, i))
        elif isinstance(g, Bool):
            return
        elif isinstance(g, Not):
            mark(g.arg, i)
        elif isinstance(g, (And, Or)):
            both = v if isinstance(g, And) else not v
            for h in (g.left, g.right):
                if both or val(h, i) == v:
                    mark(h, i)
        elif isinstance(g, Implies):
            if v:
                if not val(g.left, i):
                    mark(g.left, i)
                if val(g.right, i):
                    mark(g.right, i)
            else:
                mark(g.left, i)
                mark(g.right, i)
        elif isinstance(g, Next):
            j = t.successor(i)
            if j is not None:
                mark(g.arg, j)
        elif isinstance(g, Always):
            for j in t.positions_from(i):
                if v or not val(g.arg, j):
                    mark(g.arg, j)
        elif isinstance(g, Eventually):
            for j in t.positions_from(i):
                if not v:
                    mark(g.arg, j)
                elif val(g.arg, j):
                    mark(g.arg, j)
        elif isinstance(g, Until):
            pos = t.positions_from(i)
            if v:
                for j in pos:
                    if val(g.right, j):
                        mark(g.right, j)
                        break
                    mark(g.left, j)
            else:
                for j in pos:
                    mark(g.right, j)
                    if not val(g.left, j):
                        mark(g.left, j)
                        break
        else:
            raise TypeError(g)

    mark(phi, 0)
    points = sorted(ExplanationPoint(s, c, t.value(s, c)) for s, c in marked)
    return Explanation(phi, tuple(points), APPROX, None, len(seen))


# ---------------------------------------------------------------------- diagram

HIGH, LOW, DOT = "‾", "_", "●"
RED, RESET = "\x1b[31m", "\x1b[0m"


def render_diagram(t: Trace, e: Explanation, color: bool = False) -> str:
    """Fixed-width waveform, one row per signal and three columns per cycle."""
    marks = e.point_set()
    width = max([len("cycle")] + [len(s) for s in t.signals])
    lines = [("cycle".ljust(width) + " " + "".join(f"{c:^3}" for c in range(t.length))).rstrip()]
    for s in t.signals:
        cells = []
        for c in range(t.length):
            g = HIGH if t.value(s, c) else LOW
            if (s, c) in marks:
                dot = f"{RED}{DOT}{RESET}" if color else DOT
                cells.append(g + dot + g)
            else:
                cells.append(g * 3)
        lines.append(s.ljust(width) + " " + "".join(cells))
    if t.loop_start is not None:
        lines.append(f"loop: cycles {t.loop_start}..{t.length - 1} repeat forever")
    lines.append(f"{DOT} cause of failure of {to_str(e.formula)} ({e.method})")
    if not e.points:
        lines.append("warning: no explanation points; the formula mentions no signal whose value matters here")
    return "\n".join(lines) + "\n"
