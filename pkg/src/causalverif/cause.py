"""Actual causality (AC1-AC3), degree of responsibility and degree of blame."""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from ._solver import Compiled
from .errors import CapExceeded, FormatError, FormulaMentionsExogenous, ModelError, SignatureMismatch, UnknownVariable
from .exprs import CausalFormula, parse_assignment
from .model import CausalModel, load_model

DEFAULT_CAP = int(os.environ.get("CAUSALVERIF_CAP", "24"))


@dataclass(frozen=True)
class Witness:
    """``(W, w, x')`` certifying AC2, plus the actual values ``z*`` of ``Z = V \\ W``."""

    contingency_vars: tuple[str, ...]
    contingency_values: dict[str, Any]
    alt_cause_values: dict[str, Any]
    z_star: dict[str, Any] = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.contingency_vars)


@dataclass(frozen=True)
class CauseReport:
    candidate: tuple[tuple[str, Any], ...]
    is_cause: bool
    responsibility: Fraction
    witness: Witness | None = None
    failed_condition: str | None = None  # "AC1" | "AC2" | "AC3"

    def describe(self) -> str:
        cand = " & ".join(f"{k}={v}" for k, v in self.candidate)
        if not self.is_cause:
            return f"{cand}: not a cause (fails {self.failed_condition})"
        w = self.witness
        cont = ", ".join(f"{k}<-{w.contingency_values[k]}" for k in w.contingency_vars) or "empty"
        alt = ", ".join(f"{k}<-{v}" for k, v in w.alt_cause_values.items())
        return (f"{cand}: cause; contingency {{{cont}}}; alternative {{{alt}}}; "
                f"responsibility {fraction_str(self.responsibility)}")


@dataclass(frozen=True)
class BelowThreshold:
    """No witness of size <= ``k_max``: responsibility is below ``1/(k_max+1)``, possibly 0."""

    k_max: int

    def __bool__(self):
        return False

    def __str__(self):
        return f"<1/{self.k_max + 1}"


def fraction_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _guard(model: CausalModel, cap: int | None, force: bool) -> None:
    cap = DEFAULT_CAP if cap is None else cap
    n = len(model.endogenous)
    if n > cap and not force:
        raise CapExceeded("causal model", n, cap)


def _as_candidate(model: CausalModel, candidate) -> tuple[tuple[str, Any], ...]:
    if isinstance(candidate, str):
        items = parse_assignment(candidate)
    elif isinstance(candidate, Mapping):
        items = list(candidate.items())
    else:
        items = list(candidate)
    if not items:
        raise ModelError("a candidate cause needs at least one conjunct")
    seen = {}
    for k, v in items:
        if k not in model.domains:
            raise UnknownVariable(k, "candidate cause")
        if k not in model.endogenous:
            raise ModelError(f"candidate conjunct {k!r} is exogenous; causes range over endogenous variables")
        if k in seen:
            raise ModelError(f"variable {k!r} appears twice in the candidate")
        seen[k] = model.resolve_value(k, v)
    rank = {v: i for i, v in enumerate(model.endogenous)}
    return tuple(sorted(seen.items(), key=lambda kv: rank[kv[0]]))


def _cause_formula(model: CausalModel, formula) -> CausalFormula:
    f = model.resolve_formula(formula)
    if f.intervention:
        raise ModelError("the outcome formula of a causal query must be intervention-free")
    exo = [v for v in f.variables() if v in model.exogenous]
    if exo:
        raise FormulaMentionsExogenous(exo)
    return f


class _Engine:
    """Witness search for one ``(model, context, formula)`` triple.

    The search enumerates contingency sets in increasing size, in lexicographic
    order of sorted variable names, then values in domain order, so the first
    witness found is a minimum-size one and ties resolve deterministically. Three
    prunings keep the set of minimum witnesses unchanged:

    * contingency variables are drawn only from ancestors of the formula in the
      graph of parents each equation actually reads under the context,
    * a variable whose equation reads no endogenous input is never held at its
      actual value (that intervention is a no-op),
    * ``W`` containing a sub-contingency already shown to falsify the formula with
      the cause at its actual value is skipped, since AC2(b) must fail for it.

    AC2(b) restorations ``Z' <- z*`` are enumerated over the ``Z`` variables that are
    descendants of ``W`` and ancestors of the formula; restoring any other variable
    re-imposes the value it already takes.
    """

    def __init__(self, model: CausalModel, context, formula: CausalFormula, kernels=None):
        self.model = model
        self.formula = formula
        c = self.c = Compiled(model, context, kernels)
        fvars = [c.index[v] for v in formula.variables()]
        names = c.names
        doms = c.domains

        def phi_fn(values):
            return formula.satisfied_by({names[i]: doms[i][values[i]] for i in fvars})

        c.set_phi(fvars, phi_fn)
        self.actual = c.solve({})
        # the dependency graph under the fixed context
        eff = {v: c.effective_parents(v) for v in c.endo}
        self.children: dict[int, list[int]] = {i: [] for i in c.endo}
        for v, ps in eff.items():
            for p in ps:
                self.children[p].append(v)
        anc = set()
        stack = [i for i in fvars if i in self.children]
        while stack:
            v = stack.pop()
            if v in anc:
                continue
            anc.add(v)
            stack.extend(eff[v])
        self.relevant = anc
        self._desc: dict[int, set[int]] = {}
        self.leaves = {v for v in c.endo if not eff[v]}

    def holds_actually(self) -> bool:
        return self.c.phi(self.actual)

    def _descendants(self, roots: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for r in roots:
            d = self._desc.get(r)
            if d is None:
                d = set()
                stack = [r]
                while stack:
                    v = stack.pop()
                    for ch in self.children[v]:
                        if ch not in d:
                            d.add(ch)
                            stack.append(ch)
                self._desc[r] = d
            out |= d
        return out

    def find_witness(self, cause: Sequence[tuple[int, int]], k_max: int | None = None):
        """Minimum ``(W, w, x')`` for ``cause`` given as (index, value-index) pairs, or None."""
        c = self.c
        xs = [i for i, _ in cause]
        x_actual = dict(cause)
        if not any(i in self.relevant for i in xs):
            return None
        pool = sorted((v for v in self.relevant if v not in x_actual), key=lambda i: c.names[i])
        limit = len(pool) if k_max is None else min(k_max, len(pool))
        xv = tuple(v for _, v in cause)
        alts = [a for a in itertools.product(*(range(len(c.domains[i])) for i in xs)) if a != xv]
        actual = self.actual
        breaking: list[frozenset] = []
        opts_of = {w: [d for d in range(len(c.domains[w])) if not (w in self.leaves and d == actual[w])]
                   for w in pool}
        pool = [w for w in pool if opts_of[w]]
        limit = min(limit, len(pool))
        for k in range(limit + 1):
            for W in itertools.combinations(pool, k):
                options = [opts_of[w] for w in W]
                zp = None
                for wv in itertools.product(*options):
                    items = frozenset(zip(W, wv))
                    if breaking and any(b <= items for b in breaking):
                        continue
                    forced_w = dict(zip(W, wv))
                    b_ok = None
                    for alt in alts:
                        forced = dict(zip(xs, alt))
                        forced.update(forced_w)
                        if c.phi_under(forced):
                            continue
                        if b_ok is None:
                            if zp is None:
                                wset = set(W)
                                zp = sorted((z for z in self._descendants(W) if z in self.relevant
                                             and z not in wset and z not in x_actual), key=lambda i: c.names[i])
                            bits = list(zip(W, wv)) + [(z, actual[z]) for z in zp]
                            mask = c.ac2b(x_actual, bits)
                            b_ok = mask < 0
                            if not b_ok and mask >> len(W) == 0:
                                breaking.append(frozenset(bits[b] for b in range(len(W)) if (mask >> b) & 1))
                        if b_ok:
                            return W, wv, alt
                        break
        return None

    def report(self, candidate: tuple[tuple[str, Any], ...], k_max: int | None = None) -> CauseReport:
        c = self.c
        cause = [(c.index[v], c.encode(v, val)) for v, val in candidate]
        if not (self.holds_actually() and all(self.actual[i] == val for i, val in cause)):
            return CauseReport(candidate, False, Fraction(0), None, "AC1")
        found = self.find_witness(cause, k_max)
        if found is None:
            return CauseReport(candidate, False, Fraction(0), None, "AC2")
        for r in range(1, len(cause)):
            for sub in itertools.combinations(cause, r):
                if self.find_witness(list(sub), k_max) is not None:
                    return CauseReport(candidate, False, Fraction(0), None, "AC3")
        W, wv, alt = found
        names, doms = c.names, c.domains
        wvars = tuple(names[i] for i in W)
        witness = Witness(
            contingency_vars=wvars,
            contingency_values={names[i]: doms[i][v] for i, v in zip(W, wv)},
            alt_cause_values={names[i]: doms[i][v] for (i, _), v in zip(cause, alt)},
            z_star={names[i]: doms[i][self.actual[i]] for i in c.endo if i not in set(W)},
        )
        return CauseReport(candidate, True, Fraction(1, len(W) + 1), witness, None)


def check_cause(model: CausalModel, context, candidate, formula, *, k_max: int | None = None,
                cap: int | None = None, force: bool = False, kernels=None) -> CauseReport:
    """Decide whether ``candidate`` is an actual cause of ``formula`` in ``(model, context)``.

    ``candidate`` is a mapping, a sequence of ``(var, value)`` pairs or text such as
    ``"ST=1, BT=1"``; ``formula`` is an intervention-free causal formula or its text.
    ``k_max`` bounds the contingency size explored (including the AC3 subset
    searches). Reports carry a minimum witness and the responsibility ``1/(k+1)``.
    """
    _guard(model, cap, force)
    f = _cause_formula(model, formula)
    cand = _as_candidate(model, candidate)
    return _Engine(model, context, f, kernels).report(cand, k_max)


def responsibility(model: CausalModel, context, candidate, formula, **kw) -> Fraction:
    return check_cause(model, context, candidate, formula, **kw).responsibility


def responsibility_bounded(model: CausalModel, context, candidate, formula, k_max: int,
                           **kw) -> Fraction | BelowThreshold:
    """Responsibility if a witness with at most ``k_max`` contingency variables exists.

    Returns exact ``0`` when non-causality is certain without the bound (AC1 fails,
    AC3 fails, or the bounded search already covered every contingency set), and
    :class:`BelowThreshold` otherwise.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    rep = check_cause(model, context, candidate, formula, k_max=k_max, **kw)
    return bounded_value(model, rep, k_max)


def bounded_value(model: CausalModel, rep: CauseReport, k_max: int) -> Fraction | BelowThreshold:
    if rep.is_cause or rep.failed_condition in ("AC1", "AC3"):
        return rep.responsibility
    if k_max >= len(model.endogenous) - len(rep.candidate):
        return Fraction(0)
    return BelowThreshold(k_max)


def find_causes(model: CausalModel, context, formula, max_conjuncts: int = 1, *,
                exclude_formula_vars: bool = False, k_max: int | None = None,
                cap: int | None = None, force: bool = False, kernels=None) -> list[CauseReport]:
    """All causes of ``formula`` with at most ``max_conjuncts`` conjuncts.

    Sorted by descending responsibility, then by the declaration order of the
    conjunct variables.
    """
    if max_conjuncts < 1:
        raise ValueError("max_conjuncts must be at least 1")
    _guard(model, cap, force)
    f = _cause_formula(model, formula)
    eng = _Engine(model, context, f, kernels)
    if not eng.holds_actually():
        return []
    actual = eng.c.decode(eng.actual)
    skip = set(f.variables()) if exclude_formula_vars else set()
    pool = [v for v in model.endogenous if v not in skip]
    rank = {v: i for i, v in enumerate(model.endogenous)}
    out = []
    for r in range(1, max_conjuncts + 1):
        for combo in itertools.combinations(pool, r):
            rep = eng.report(tuple((v, actual[v]) for v in combo), k_max)
            if rep.is_cause:
                out.append(rep)
    out.sort(key=lambda rep: (-rep.responsibility, [rank[v] for v, _ in rep.candidate]))
    return out


# ----------------------------------------------------------------------- blame


@dataclass(frozen=True)
class EpistemicState:
    """A finite set of ``(model, context)`` situations with exact probabilities."""

    situations: tuple[tuple[CausalModel, Any], ...]
    probabilities: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.situations) != len(self.probabilities):
            raise ModelError("epistemic state needs one probability per situation")
        probs = tuple(Fraction(p) for p in self.probabilities)
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "situations", tuple(self.situations))
        if any(p < 0 for p in probs):
            raise ModelError("probabilities must be nonnegative")
        if sum(probs, Fraction(0)) != 1:
            raise ModelError(f"probabilities sum to {sum(probs, Fraction(0))}, not 1")


def blame(state: EpistemicState, setting, formula, **kw) -> Fraction:
    """Expected degree of responsibility of ``setting`` for ``formula`` over ``state``.

    In each situation the responsibility of ``X = x`` is taken; it is 0 wherever
    AC1 fails there (``X`` does not actually take ``x`` or ``formula`` is false).
    """
    if isinstance(setting, str):
        items = parse_assignment(setting)
    elif isinstance(setting, Mapping):
        items = list(setting.items())
    else:
        items = list(setting)
    total = Fraction(0)
    for (model, ctx), p in zip(state.situations, state.probabilities):
        missing = [k for k, _ in items if k not in model.endogenous]
        if missing:
            raise SignatureMismatch(f"situation model lacks endogenous variable(s) {missing}")
        try:
            dr = responsibility(model, ctx, items, formula, **kw)
        except UnknownVariable as e:
            raise SignatureMismatch(f"situation model lacks variable {e.name!r}") from None
        total += p * dr
    return total


def load_epistemic_state(path: str | Path) -> EpistemicState:
    """``{"situations": [{"model": file-or-inline, "context": name-or-map, "probability": "p/q"}]}``"""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, path=path, line=e.lineno, col=e.colno) from None
    entries = data["situations"] if isinstance(data, Mapping) else data
    sits, probs = [], []
    cache: dict[str, CausalModel] = {}
    for ent in entries:
        if isinstance(ent, Sequence) and not isinstance(ent, (str, Mapping)):
            m, ctx, p = ent
        else:
            m, ctx, p = ent["model"], ent["context"], ent["probability"]
        if isinstance(m, str):
            mp = str((path.parent / m).resolve())
            if mp not in cache:
                cache[mp] = load_model(mp)
            model = cache[mp]
        else:
            model = CausalModel.from_dict(m)
        try:
            prob = Fraction(str(p))
        except ValueError:
            raise FormatError(f"bad probability {p!r}", path=path) from None
        sits.append((model, model.context(ctx)))
        probs.append(prob)
    return EpistemicState(tuple(sits), tuple(probs))
