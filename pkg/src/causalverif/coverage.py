"""Mutation coverage, causal coverage with responsibility, and vacuity.

Causal coverage treats the labels of a Kripke structure as a binary causal model:
one endogenous variable per (state, atom) pair, each copied from a private
exogenous variable whose context value is the actual label, and an outcome
variable ``SAT`` whose equation runs the model checker on the relabeled structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .cause import BelowThreshold, _Engine, bounded_value, DEFAULT_CAP
from .errors import CapExceeded, SpecificationFails, UnknownAtom, UnknownState
from .exprs import CausalFormula, Event, Ref
from .ltl.buchi import check_structure
from .ltl.kripke import KripkeStructure
from .ltl.syntax import FALSE, TRUE, Bool, Formula, occurrences, replace_at, to_str
from .model import CausalModel, ExprEquation, FunctionEquation


@dataclass(frozen=True, order=True)
class Mutation:
    state: str
    atom: str


def mutate(k: KripkeStructure, m: Mutation) -> KripkeStructure:
    """Copy of ``k`` with ``m.atom`` flipped in ``m.state``."""
    return mutate_many(k, [m])


def mutate_many(k: KripkeStructure, ms: Iterable[Mutation]) -> KripkeStructure:
    labels = {s: set(k.labels[s]) for s in k.states}
    for m in ms:
        if m.state not in labels:
            raise UnknownState(f"no state named {m.state!r}")
        if m.atom not in k.alphabet:
            raise UnknownAtom([m.atom])
        labels[m.state] ^= {m.atom}
    return k.with_labels(labels)


@dataclass(frozen=True)
class CoverageEntry:
    state: str
    atom: str
    covered: bool
    is_cause: bool | None = None
    responsibility: Fraction | BelowThreshold | None = None
    witness_mutations: tuple[Mutation, ...] | None = None


@dataclass(frozen=True)
class CoverageReport:
    formula: Formula
    entries: tuple[CoverageEntry, ...]

    def covered_states(self, atom: str | None = None) -> list[str]:
        return [e.state for e in self.entries if e.covered and (atom is None or e.atom == atom)]

    def causes(self) -> list[CoverageEntry]:
        return [e for e in self.entries if e.is_cause]

    def entry(self, state: str, atom: str) -> CoverageEntry:
        for e in self.entries:
            if e.state == state and e.atom == atom:
                return e
        raise KeyError((state, atom))


def _require_pass(k: KripkeStructure, spec: Formula) -> None:
    if not check_structure(k, spec).holds:
        raise SpecificationFails(f"{to_str(spec)} does not hold; coverage and vacuity need a passing specification")


def _atoms_arg(k: KripkeStructure, atom: str | Sequence[str] | None) -> list[str]:
    if atom is None:
        return list(k.alphabet)
    names = [atom] if isinstance(atom, str) else list(atom)
    for a in names:
        if a not in k.alphabet:
            raise UnknownAtom([a])
    return names


def coverage_check(k: KripkeStructure, spec: Formula, atom: str | Sequence[str]) -> CoverageReport:
    """Counterfactual coverage: ``(w, q)`` is covered iff flipping ``q`` in ``w`` falsifies ``spec``."""
    _require_pass(k, spec)
    entries = []
    for q in _atoms_arg(k, atom):
        for w in k.states:
            covered = not check_structure(mutate(k, Mutation(w, q)), spec).holds
            entries.append(CoverageEntry(w, q, covered))
    return CoverageReport(spec, tuple(entries))


def coverage_causal_model(k: KripkeStructure, spec: Formula, pairs: Sequence[tuple[str, str]]):
    """Binary causal model over ``pairs`` with outcome ``SAT``; returns ``(model, var_of_pair)``."""
    var = {p: f"v{i}" for i, p in enumerate(pairs)}
    exo = {f"u{i}": [0, 1] for i in range(len(pairs))}
    endo = {var[p]: [0, 1] for p in pairs}
    endo["SAT"] = [0, 1]
    eqs = {var[p]: ExprEquation(Ref(f"u{i}")) for i, p in enumerate(pairs)}
    fixed = {s: {a for a in k.labels[s] if (s, a) not in var} for s in k.states}

    def sat(env):
        labels = {s: set(fixed[s]) for s in k.states}
        for (s, a), v in var.items():
            if env[v]:
                labels[s].add(a)
        return int(check_structure(k.with_labels(labels), spec).holds)

    inputs = tuple(var[p] for p in pairs)
    eqs["SAT"] = FunctionEquation(inputs, sat, "model-check")
    ctx = {f"u{i}": int(a in k.labels[s]) for i, (s, a) in enumerate(pairs)}
    return CausalModel(exo, endo, eqs, {"actual": ctx}), var


def causal_coverage(k: KripkeStructure, spec: Formula, atom: str | Sequence[str] | None,
                    k_max: int | None = None, *, all_atoms: bool = False,
                    cap: int | None = None, force: bool = False) -> CoverageReport:
    """Causes of ``spec``'s satisfaction among label bits, with responsibility.

    Variables are the (state, atom) pairs for the atoms of interest; with
    ``all_atoms`` every atom of the alphabet gets variables and all are reported.
    ``k_max`` bounds the contingency size (``None`` searches exhaustively).
    """
    _require_pass(k, spec)
    atoms_of_interest = list(k.alphabet) if all_atoms else _atoms_arg(k, atom)
    pairs = [(s, a) for a in atoms_of_interest for s in k.states]
    cap = DEFAULT_CAP if cap is None else cap
    if len(pairs) > cap and not force:
        raise CapExceeded("coverage model", len(pairs), cap)
    model, var = coverage_causal_model(k, spec, pairs)
    eng = _Engine(model, "actual", CausalFormula(Event("SAT", 1)))
    name_pair = {v: p for p, v in var.items()}
    entries = []
    for (s, a) in pairs:
        actual = int(a in k.labels[s])
        rep = eng.report(((var[(s, a)], actual),), k_max)
        covered = not check_structure(mutate(k, Mutation(s, a)), spec).holds
        if k_max is None:
            value = rep.responsibility
        else:
            value = bounded_value(model, rep, k_max)
        muts = None
        if rep.is_cause:
            w = rep.witness
            muts = tuple(Mutation(*name_pair[v]) for v in w.contingency_vars
                         if v in name_pair and w.contingency_values[v] != int(name_pair[v][1] in k.labels[name_pair[v][0]]))
        entries.append(CoverageEntry(s, a, covered, rep.is_cause, value, muts))
    return CoverageReport(spec, tuple(entries))


@dataclass(frozen=True)
class VacuityEntry:
    path: tuple[int, ...]
    subformula: Formula
    polarity: int
    replaced_with: Bool
    vacuous: bool

    @property
    def text(self) -> str:
        return to_str(self.subformula)


@dataclass(frozen=True)
class VacuityReport:
    formula: Formula
    entries: tuple[VacuityEntry, ...]

    @property
    def vacuous(self) -> bool:
        return any(e.vacuous for e in self.entries)


def vacuity_check(k: KripkeStructure, spec: Formula) -> VacuityReport:
    """Replace each proper subformula occurrence by its polarity's bottom value and re-check.

    Positive occurrences become ``false`` and negative ones ``true``. The root
    occurrence and literal constants are skipped.
    """
    _require_pass(k, spec)
    entries = []
    for path, sub, pol in occurrences(spec):
        if not path or isinstance(sub, Bool):
            continue
        bottom = FALSE if pol > 0 else TRUE
        still = check_structure(k, replace_at(spec, path, bottom)).holds
        entries.append(VacuityEntry(path, sub, pol, bottom, still))
    return VacuityReport(spec, tuple(entries))
