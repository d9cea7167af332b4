"""Kripke structures and their JSON file format.

``{"states": [...], "initial": [...], "edges": [[src, dst], ...],
"labels": {state: [atom, ...]}, "alphabet": [...]}``; ``alphabet`` is optional and
defaults to the atoms used in ``labels``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..errors import FormatError, UnknownState


class KripkeStructure:
    def __init__(self, states: Sequence[str], initial: Iterable[str], edges: Iterable[Sequence[str]],
                 labels: Mapping[str, Iterable[str]], alphabet: Iterable[str] | None = None):
        self.states = tuple(str(s) for s in states)
        if len(set(self.states)) != len(self.states):
            raise FormatError("duplicate state names")
        known = set(self.states)
        self.initial = tuple(dict.fromkeys(str(s) for s in initial))
        if not self.initial:
            raise FormatError("a Kripke structure needs at least one initial state")
        for s in self.initial:
            if s not in known:
                raise UnknownState(f"initial state {s!r} is not declared")
        succ: dict[str, list[str]] = {s: [] for s in self.states}
        for e in edges:
            if len(e) != 2:
                raise FormatError(f"edge {e!r} must be a [source, target] pair")
            a, b = str(e[0]), str(e[1])
            for s in (a, b):
                if s not in known:
                    raise UnknownState(f"edge mentions undeclared state {s!r}")
            if b not in succ[a]:
                succ[a].append(b)
        dead = [s for s in self.states if not succ[s]]
        if dead:
            raise FormatError(f"transition relation is not left-total; no successor for {dead}")
        self._succ = {s: tuple(v) for s, v in succ.items()}
        for s in labels:
            if s not in known:
                raise UnknownState(f"label for undeclared state {s!r}")
        self.labels = {s: frozenset(labels.get(s, ())) for s in self.states}
        used = set().union(*self.labels.values()) if self.labels else set()
        if alphabet is None:
            self.alphabet = tuple(sorted(used))
        else:
            self.alphabet = tuple(dict.fromkeys(alphabet))
            extra = used - set(self.alphabet)
            if extra:
                raise FormatError(f"labels use atoms outside the alphabet: {sorted(extra)}")

    @property
    def edges(self) -> list[tuple[str, str]]:
        return [(a, b) for a in self.states for b in self._succ[a]]

    def successors(self, state: str) -> tuple[str, ...]:
        return self._succ[state]

    def with_labels(self, labels: Mapping[str, Iterable[str]]) -> "KripkeStructure":
        return KripkeStructure(self.states, self.initial, self.edges, labels, self.alphabet)

    def to_dict(self) -> dict:
        return {
            "states": list(self.states),
            "initial": list(self.initial),
            "edges": [list(e) for e in self.edges],
            "labels": {s: sorted(self.labels[s]) for s in self.states},
            "alphabet": list(self.alphabet),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "KripkeStructure":
        try:
            return cls(d["states"], d["initial"], d["edges"], d.get("labels", {}), d.get("alphabet"))
        except KeyError as e:
            raise FormatError(f"Kripke structure is missing the {e.args[0]!r} section") from None
        except TypeError as e:
            raise FormatError(f"malformed Kripke structure: {e}") from None

    def __eq__(self, other):
        return isinstance(other, KripkeStructure) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"KripkeStructure(states={list(self.states)}, initial={list(self.initial)})"


def load_kripke(path: str | Path) -> KripkeStructure:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, path=path, line=e.lineno, col=e.colno) from None
    try:
        return KripkeStructure.from_dict(data)
    except (FormatError, UnknownState) as e:
        raise FormatError(str(e), path=path) from None
