"""Traces (finite or lasso), their CSV format, and LTL evaluation over them.

Finite traces use the following end-of-trace conventions: ``X f`` is false at the
last cycle, ``G f`` only constrains the remaining cycles, and ``F f`` / ``f U g``
must be fulfilled inside the trace. A lasso trace ``(cycles, loop_start)`` denotes
the infinite word ``cycles[:loop_start] (cycles[loop_start:])^omega``.

The CSV format has a header row of signal names and one row of 0/1 values per
cycle; a line ``#loop <index>`` anywhere marks a lasso.
"""

from __future__ import annotations

import csv
import io
from array import array
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .._backend import kernels as _default_kernels
from .._pykernels import (L_AND, L_ATOM, L_F, L_FALSE, L_G, L_IMPL, L_NEXT, L_NOT, L_OR, L_TRUE, L_U)
from ..errors import AlphabetMismatch, FormatError
from .syntax import (Always, And, Atom, Bool, Eventually, Formula, Implies, Next, Not, Or, Until,
                     atoms, children, subformulas)


@dataclass(frozen=True)
class Trace:
    signals: tuple[str, ...]
    cycles: tuple[tuple[int, ...], ...]
    loop_start: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "signals", tuple(self.signals))
        object.__setattr__(self, "cycles", tuple(tuple(int(bool(v)) for v in row) for row in self.cycles))
        if not self.cycles:
            raise FormatError("a trace needs at least one cycle")
        if len(set(self.signals)) != len(self.signals):
            raise FormatError("duplicate signal names in trace")
        for row in self.cycles:
            if len(row) != len(self.signals):
                raise FormatError(f"trace row {row} does not match {len(self.signals)} signals")
        if self.loop_start is not None and not 0 <= self.loop_start < len(self.cycles):
            raise FormatError(f"loop start {self.loop_start} outside 0..{len(self.cycles) - 1}")

    @property
    def length(self) -> int:
        return len(self.cycles)

    @property
    def is_lasso(self) -> bool:
        return self.loop_start is not None

    def value(self, signal: str, cycle: int) -> int:
        return self.cycles[cycle][self.signals.index(signal)]

    def flipped(self, points: Iterable[tuple[str, int]]) -> "Trace":
        rows = [list(r) for r in self.cycles]
        for sig, c in points:
            j = self.signals.index(sig)
            rows[c][j] = 1 - rows[c][j]
        return Trace(self.signals, tuple(tuple(r) for r in rows), self.loop_start)

    def positions_from(self, i: int) -> list[int]:
        """Distinct cycles reachable from ``i`` in temporal order."""
        out = list(range(i, self.length))
        if self.loop_start is not None and self.loop_start < i:
            out.extend(range(self.loop_start, i))
        return out

    def successor(self, i: int) -> int | None:
        if i + 1 < self.length:
            return i + 1
        return self.loop_start

    @classmethod
    def from_dicts(cls, rows: Sequence[Mapping[str, int]], signals: Sequence[str] | None = None,
                   loop_start: int | None = None) -> "Trace":
        if signals is None:
            signals = sorted({k for r in rows for k in r})
        return cls(tuple(signals), tuple(tuple(int(r.get(s, 0)) for s in signals) for r in rows), loop_start)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.signals)
        for row in self.cycles:
            w.writerow(row)
        if self.loop_start is not None:
            buf.write(f"#loop {self.loop_start}\n")
        return buf.getvalue()


def parse_trace_csv(text: str, path: str | Path | None = None) -> Trace:
    loop = None
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s:
            continue
        if s.startswith("#"):
            parts = s[1:].split()
            if parts and parts[0] == "loop":
                if len(parts) != 2 or not parts[1].isdigit():
                    raise FormatError("expected '#loop <index>'", path=path, line=lineno, col=1)
                loop = int(parts[1])
            continue
        lines.append((lineno, raw))
    if not lines:
        raise FormatError("empty trace file", path=path)
    header_line, header = lines[0]
    signals = [h.strip() for h in next(csv.reader([header]))]
    rows = []
    for lineno, raw in lines[1:]:
        cells = [c.strip() for c in next(csv.reader([raw]))]
        if len(cells) != len(signals):
            raise FormatError(f"expected {len(signals)} values, found {len(cells)}", path=path, line=lineno, col=1)
        row = []
        for k, c in enumerate(cells):
            if c not in ("0", "1"):
                col = raw.find(c) + 1 if c else 1
                raise FormatError(f"value {c!r} of {signals[k]!r} is not 0 or 1", path=path, line=lineno, col=col)
            row.append(int(c))
        rows.append(tuple(row))
    if not rows:
        raise FormatError("trace has a header but no cycles", path=path, line=header_line)
    if loop is not None and loop >= len(rows):
        raise FormatError(f"#loop {loop} is beyond the last cycle {len(rows) - 1}", path=path)
    return Trace(tuple(signals), tuple(rows), loop)


def load_trace(path: str | Path) -> Trace:
    path = Path(path)
    return parse_trace_csv(path.read_text(), path)


# ------------------------------------------------------------------- evaluation

_OPS = {Atom: L_ATOM, Not: L_NOT, And: L_AND, Or: L_OR, Implies: L_IMPL,
        Next: L_NEXT, Eventually: L_F, Always: L_G, Until: L_U}


class TraceProgram:
    """``formula`` compiled to a flat post-order op list for a fixed signal layout."""

    def __init__(self, formula: Formula, signals: Sequence[str], kernels=None):
        missing = atoms(formula) - set(signals)
        if missing:
            raise AlphabetMismatch(missing)
        self.formula = formula
        self.signals = tuple(signals)
        self.kernels = kernels or _default_kernels
        self.nodes = subformulas(formula)
        self.node_index = {g: k for k, g in enumerate(self.nodes)}
        col = {s: j for j, s in enumerate(self.signals)}
        ops, aa, bb, ac = [], [], [], []
        for g in self.nodes:
            if isinstance(g, Bool):
                ops.append(L_TRUE if g.value else L_FALSE)
            else:
                ops.append(_OPS[type(g)])
            kids = children(g)
            aa.append(self.node_index[kids[0]] if kids else -1)
            bb.append(self.node_index[kids[1]] if len(kids) > 1 else -1)
            ac.append(col[g.name] if isinstance(g, Atom) else -1)
        self._ops = (array("i", ops), array("i", aa), array("i", bb), array("i", ac))

    def table(self, flat: Sequence[int], n_cycles: int, loop_start: int | None) -> array:
        out = array("i", bytes(4 * len(self.nodes) * n_cycles))
        tr = flat if isinstance(flat, array) else array("i", flat)
        self.kernels.ltl_eval(*self._ops, tr, n_cycles, len(self.signals),
                              -1 if loop_start is None else loop_start, out)
        return out

    def holds(self, flat: Sequence[int], n_cycles: int, loop_start: int | None) -> bool:
        t = self.table(flat, n_cycles, loop_start)
        return bool(t[(len(self.nodes) - 1) * n_cycles])


def _flat(trace: Trace, signals: Sequence[str]) -> array:
    cols = [trace.signals.index(s) for s in signals]
    return array("i", [row[j] for row in trace.cycles for j in cols])


class Evaluation:
    """Truth value of every subformula of ``formula`` at every cycle of ``trace``."""

    def __init__(self, trace: Trace, formula: Formula, kernels=None):
        self.trace = trace
        self.formula = formula
        self.program = TraceProgram(formula, trace.signals, kernels)
        self._tab = self.program.table(_flat(trace, trace.signals), trace.length, trace.loop_start)

    def value(self, sub: Formula, cycle: int) -> bool:
        k = self.program.node_index[sub]
        return bool(self._tab[k * self.trace.length + cycle])

    @property
    def holds(self) -> bool:
        return self.value(self.formula, 0)


def check_trace(trace: Trace, formula: Formula, kernels=None) -> bool:
    """Whether ``formula`` holds at cycle 0 of ``trace`` (finite or lasso semantics)."""
    return Evaluation(trace, formula, kernels).holds
