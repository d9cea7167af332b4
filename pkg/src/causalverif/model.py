"""Recursive structural causal models: construction, validation, evaluation, satisfaction."""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from .errors import (
    CyclicModel,
    FormatError,
    ModelError,
    PartialFunction,
    UnknownVariable,
    ValueOutOfDomain,
)
from .exprs import CausalFormula, Event, Not, eval_expr, expr_refs, expr_to_str, parse_expr, parse_formula

# Expressions over more input rows than this are range-checked lazily at evaluation.
TOTALITY_CHECK_LIMIT = 1 << 16


@dataclass(frozen=True)
class ExprEquation:
    expr: Any
    inputs: tuple[str, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(expr_refs(self.expr)))

    def compute(self, env: Mapping[str, Any]) -> Any:
        return eval_expr(self.expr, env)

    def __str__(self):
        return expr_to_str(self.expr)


@dataclass(frozen=True, eq=False)
class TableEquation:
    """Explicit lookup table keyed by the tuple of input values (in ``inputs`` order)."""

    inputs: tuple[str, ...]
    rows: Mapping[tuple, Any]

    def compute(self, env):
        key = tuple(env[v] for v in self.inputs)
        return self.rows[key]

    def __eq__(self, other):
        return (isinstance(other, TableEquation) and self.inputs == other.inputs
                and dict(self.rows) == dict(other.rows))

    def __hash__(self):
        return hash(self.inputs)


@dataclass(frozen=True, eq=False)
class FunctionEquation:
    """Opaque Python function of the named inputs; used by the verification bridges."""

    inputs: tuple[str, ...]
    fn: Callable[[Mapping[str, Any]], Any]
    label: str = "<function>"

    def compute(self, env):
        return self.fn(env)


Equation = ExprEquation | TableEquation | FunctionEquation


def _as_equation(spec) -> Equation:
    if isinstance(spec, (ExprEquation, TableEquation, FunctionEquation)):
        return spec
    if isinstance(spec, str):
        return ExprEquation(parse_expr(spec))
    if isinstance(spec, Mapping):
        if "table" in spec:
            spec = spec["table"]
        inputs = tuple(spec["inputs"])
        rows = {}
        for row in spec["rows"]:
            if len(row) != len(inputs) + 1:
                raise FormatError(f"table row {row!r} must have {len(inputs) + 1} entries")
            rows[tuple(row[:-1])] = row[-1]
        return TableEquation(inputs, rows)
    raise FormatError(f"cannot interpret equation {spec!r}")


class CausalModel:
    """A recursive causal model ``M = (S, F)``.

    ``exogenous`` and ``endogenous`` map variable names to finite ordered domains.
    ``equations`` maps each endogenous variable to an expression string, a table
    mapping (``{"inputs": [...], "rows": [[...], ...]}``) or an equation object.
    Instances are immutable; validation happens in the constructor.
    """

    def __init__(self, exogenous: Mapping[str, Sequence], endogenous: Mapping[str, Sequence],
                 equations: Mapping[str, Any], contexts: Mapping[str, Mapping] | None = None,
                 *, description: str = ""):
        self.exogenous = tuple(exogenous)
        self.endogenous = tuple(endogenous)
        self.domains = {v: tuple(d) for v, d in itertools.chain(exogenous.items(), endogenous.items())}
        self.description = description
        clash = set(self.exogenous) & set(self.endogenous)
        if clash:
            raise ModelError(f"variables declared both exogenous and endogenous: {sorted(clash)}")
        for v, d in self.domains.items():
            if not d:
                raise ModelError(f"variable {v!r} has an empty domain")
            if len(set(d)) != len(d):
                raise ModelError(f"variable {v!r} has duplicate domain values")
        self.equations = {}
        for v in self.endogenous:
            if v not in equations:
                raise ModelError(f"endogenous variable {v!r} has no equation")
            self.equations[v] = _as_equation(equations[v])
        for v in equations:
            if v not in self.endogenous:
                raise UnknownVariable(v, "equations")
        for v, eq in self.equations.items():
            for p in eq.inputs:
                if p not in self.domains:
                    raise UnknownVariable(p, f"equation for {v}")
        self.order = _topological_order(self)
        for v in self.endogenous:
            _check_totality(self, v)
        self.contexts = {name: self.check_context(ctx) for name, ctx in (contexts or {}).items()}

    # ------------------------------------------------------------------ helpers
    @property
    def variables(self) -> tuple[str, ...]:
        return self.exogenous + self.endogenous

    @property
    def is_binary(self) -> bool:
        return all(len(d) == 2 for d in self.domains.values())

    def parents(self, var: str) -> tuple[str, ...]:
        return self.equations[var].inputs

    def resolve_value(self, var: str, token: Any) -> Any:
        """Map a raw token (``1``, ``"1"``, ``"G"``) onto the matching domain value."""
        if var not in self.domains:
            raise UnknownVariable(var)
        dom = self.domains[var]
        for v in dom:
            if v == token and type(v) is type(token):
                return v
        for v in dom:
            if str(v) == str(token):
                return v
        raise ValueOutOfDomain(var, token, dom)

    def check_context(self, context: Mapping[str, Any]) -> dict[str, Any]:
        out = {}
        for k in context:
            if k not in self.exogenous:
                raise UnknownVariable(k, "context (not exogenous)")
        for u in self.exogenous:
            if u not in context:
                raise ModelError(f"context does not assign exogenous variable {u!r}")
            out[u] = self.resolve_value(u, context[u])
        return out

    def context(self, ctx: str | Mapping[str, Any]) -> dict[str, Any]:
        """A named context of this model, or a validated copy of an explicit one."""
        if isinstance(ctx, str):
            if ctx not in self.contexts:
                raise ModelError(f"model has no context named {ctx!r}; known: {sorted(self.contexts)}")
            return dict(self.contexts[ctx])
        return self.check_context(ctx)

    def check_intervention(self, intervention: Mapping[str, Any] | Sequence | None) -> dict[str, Any]:
        if not intervention:
            return {}
        items = intervention.items() if isinstance(intervention, Mapping) else intervention
        out = {}
        for k, v in items:
            if k not in self.endogenous:
                raise UnknownVariable(k, "intervention (not endogenous)")
            if k in out:
                raise ModelError(f"variable {k!r} intervened twice")
            out[k] = self.resolve_value(k, v)
        return out

    def resolve_formula(self, formula: CausalFormula | str) -> CausalFormula:
        """Parse (if needed) and bind every event value to the signature's domains."""
        if isinstance(formula, str):
            formula = parse_formula(formula)

        def res(b):
            if isinstance(b, Event):
                return Event(b.var, self.resolve_value(b.var, b.value))
            if isinstance(b, Not):
                return Not(res(b.arg))
            return type(b)(tuple(res(a) for a in b.args))

        iv = tuple(self.check_intervention(formula.intervention).items())
        return CausalFormula(res(formula.body), iv)

    # ------------------------------------------------------------- serialization
    def to_dict(self) -> dict:
        eqs = {}
        for v in self.endogenous:
            eq = self.equations[v]
            if isinstance(eq, ExprEquation):
                eqs[v] = expr_to_str(eq.expr)
            elif isinstance(eq, TableEquation):
                doms = [self.domains[i] for i in eq.inputs]
                rows = [list(key) + [eq.rows[key]] for key in itertools.product(*doms)]
                eqs[v] = {"inputs": list(eq.inputs), "rows": rows}
            else:
                raise FormatError(f"equation for {v!r} is an opaque function and cannot be serialized")
        d = {
            "exogenous": {u: list(self.domains[u]) for u in self.exogenous},
            "endogenous": {v: list(self.domains[v]) for v in self.endogenous},
            "equations": eqs,
        }
        if self.contexts:
            d["contexts"] = {k: dict(c) for k, c in self.contexts.items()}
        if self.description:
            d["description"] = self.description
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "CausalModel":
        try:
            return cls(d["exogenous"], d["endogenous"], d["equations"], d.get("contexts"),
                       description=d.get("description", ""))
        except KeyError as e:
            raise FormatError(f"model is missing the {e.args[0]!r} section") from None

    def __repr__(self):
        return f"CausalModel(exogenous={list(self.exogenous)}, endogenous={list(self.endogenous)})"


def load_model(path: str | Path) -> CausalModel:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(e.msg, path=path, line=e.lineno, col=e.colno) from None
    try:
        return CausalModel.from_dict(data)
    except FormatError as e:
        raise FormatError(str(e), path=path) from None


def dump_model(model: CausalModel) -> str:
    return json.dumps(model.to_dict(), indent=2)


def _topological_order(model: CausalModel) -> tuple[str, ...]:
    endo = model.endogenous
    rank = {v: i for i, v in enumerate(endo)}
    children: dict[str, list[str]] = {v: [] for v in endo}
    indeg = {v: 0 for v in endo}
    for v in endo:
        for p in set(model.equations[v].inputs):
            if p in rank:
                children[p].append(v)
                indeg[v] += 1
    heap = [rank[v] for v in endo if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = endo[heapq.heappop(heap)]
        order.append(v)
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, rank[c])
    if len(order) < len(endo):
        raise CyclicModel(_find_cycle(model, [v for v in endo if indeg[v] > 0]))
    return tuple(order)


def _find_cycle(model, remaining):
    rem = set(remaining)
    # walk parent links inside the unresolved set until a node repeats
    v = remaining[0]
    path, seen = [], {}
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = next(p for p in model.equations[v].inputs if p in rem)
    cyc = path[seen[v]:]
    cyc.reverse()  # report in dependency direction X -> Y meaning F_Y mentions X
    return cyc + [cyc[0]]


def _check_totality(model: CausalModel, var: str) -> None:
    eq = model.equations[var]
    if isinstance(eq, FunctionEquation):
        return
    doms = [model.domains[i] for i in eq.inputs]
    size = 1
    for d in doms:
        size *= len(d)
    if isinstance(eq, ExprEquation) and size > TOTALITY_CHECK_LIMIT:
        return
    out_dom = model.domains[var]
    for key in itertools.product(*doms):
        row = dict(zip(eq.inputs, key))
        try:
            val = eq.compute(row)
        except KeyError:
            raise PartialFunction(var, row) from None
        except (TypeError, ZeroDivisionError) as e:
            raise ModelError(f"equation for {var!r} fails on {row}: {e}") from None
        if not any(val == d for d in out_dom):
            raise ValueOutOfDomain(var, val, out_dom)


def validate(model: CausalModel) -> list[str]:
    """Topological order of the endogenous variables (ties broken by declaration order).

    Validation errors surface when the model is constructed; this returns the order
    computed there.
    """
    return list(model.order)


def _normalize(model, var, val):
    for d in model.domains[var]:
        if val == d:
            return d
    raise ValueOutOfDomain(var, val, model.domains[var])


def evaluate(model: CausalModel, context: Mapping[str, Any] | str,
             intervention: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """Unique solution of ``M_{intervention}`` under ``context``."""
    values = model.context(context)
    forced = model.check_intervention(intervention)
    for v in model.order:
        if v in forced:
            values[v] = forced[v]
        else:
            values[v] = _normalize(model, v, model.equations[v].compute(values))
    return {v: values[v] for v in model.variables}


def holds(model: CausalModel, context: Mapping[str, Any] | str, formula: CausalFormula | str) -> bool:
    """``(M, u) |= formula``, honouring an optional root intervention prefix."""
    f = model.resolve_formula(formula)
    sol = evaluate(model, context, dict(f.intervention))
    return f.satisfied_by(sol)

