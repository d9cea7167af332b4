"""Index-encoded compilation of a causal model for repeated solving under interventions.

Expression and table equations are tabulated densely over their parents' value
indices so the kernels can solve a model with integer lookups only. Opaque
function equations (the verification bridges) are evaluated on demand and memoized
per ``Compiled`` instance; a model containing one is solved on the Python path.
"""

from __future__ import annotations

import itertools
from array import array
from typing import Any, Callable, Mapping, Sequence

from ._backend import kernels as _default_kernels
from .errors import ValueOutOfDomain
from .model import CausalModel, FunctionEquation

DENSE_LIMIT = 1 << 20


def _iarray(seq) -> array:
    return array("i", seq)


class Compiled:
    def __init__(self, model: CausalModel, context: Mapping[str, Any], kernels=None):
        self.model = model
        self.kernels = kernels or _default_kernels
        names = model.variables
        self.names = names
        self.index = {v: i for i, v in enumerate(names)}
        self.domains = [model.domains[v] for v in names]
        self.n = len(names)
        self.exo = [self.index[u] for u in model.exogenous]
        self.endo = [self.index[v] for v in model.endogenous]
        self.topo = [self.index[v] for v in model.order]
        self.parents = {self.index[v]: [self.index[p] for p in model.parents(v)] for v in model.endogenous}
        ctx = model.context(context)
        base = [-1] * self.n
        for u in model.exogenous:
            base[self.index[u]] = self.encode(u, ctx[u])
        self.base_values = base

        self._lazy: dict[int, Callable[[Sequence[int]], int]] = {}
        pstart, pcount, parents, strides, tstart, table = [], [], [], [], [], []
        for i in range(self.n):
            pstart.append(len(parents))
            tstart.append(len(table))
            if i not in self.parents:
                pcount.append(0)
                continue
            var = names[i]
            eq = model.equations[var]
            ps = self.parents[i]
            sizes = [len(self.domains[p]) for p in ps]
            total = 1
            for s in sizes:
                total *= s
            if isinstance(eq, FunctionEquation) or total > DENSE_LIMIT:
                self._lazy[i] = self._make_lazy(i, eq, ps)
                pcount.append(0)
                continue
            pcount.append(len(ps))
            stride = 1
            st = []
            for s in reversed(sizes):
                st.append(stride)
                stride *= s
            st.reverse()
            parents.extend(ps)
            strides.extend(st)
            table.extend(self._tabulate(i, eq, ps))
        self.dense = not self._lazy
        self._arrays = tuple(_iarray(x) for x in (self.topo, pstart, pcount, parents, strides, tstart, table))
        self._pstart, self._pcount, self._parents, self._strides, self._tstart, self._table = (
            pstart, pcount, parents, strides, tstart, table)
        self._scratch_v = _iarray([0] * self.n)
        self._scratch_f = _iarray([0] * self.n)
        self._phi = None
        self.solves = 0

    def _tabulate(self, i, eq, ps) -> list[int]:
        # tables depend only on the equation, so they are shared by every context
        cache = self.model.__dict__.setdefault("_dense_tables", {})
        var = self.names[i]
        hit = cache.get(var)
        if hit is None:
            out_dom = self.domains[i]
            hit = [self._encode_result(i, eq.compute(dict(zip(eq.inputs, key))), out_dom)
                   for key in itertools.product(*(self.domains[p] for p in ps))]
            cache[var] = hit
        return hit

    def effective_parents(self, i: int) -> list[int]:
        """Endogenous parents of ``i`` its equation actually reads once the context is fixed.

        Dense tables are scanned with exogenous parents pinned to the context; opaque
        and oversized equations keep every endogenous parent.
        """
        ps = self.parents[i]
        endo_pos = [j for j, p in enumerate(ps) if p in self.parents]
        if i in self._lazy:
            return [ps[j] for j in endo_pos]
        sizes = [len(self.domains[p]) for p in ps]
        if self._pcount[i] == 0 or len(endo_pos) > 16:
            return [ps[j] for j in endo_pos]
        cache = self.model.__dict__.setdefault("_effective_parents", {})
        key = (i, tuple(self.base_values[p] for p in ps if p not in self.parents))
        if key in cache:
            return cache[key]
        s0, t0 = self._pstart[i], self._tstart[i]
        strides = self._strides[s0:s0 + len(ps)]
        fixed = t0 + sum(self.base_values[p] * strides[j] for j, p in enumerate(ps) if p not in self.parents)
        # the table slice over endogenous parents, mixed radix with the last parent fastest
        offsets = [fixed]
        for j in endo_pos:
            offsets = [o + v * strides[j] for o in offsets for v in range(sizes[j])]
        sub = [self._table[o] for o in offsets]
        out = []
        radix = 1
        for j in reversed(endo_pos):
            size = sizes[j]
            if any(sub[k] != sub[k + v * radix] for k in range(len(sub)) if (k // radix) % size == 0
                   for v in range(1, size)):
                out.append(ps[j])
            radix *= size
        out.reverse()
        cache[key] = out
        return out

    # ----------------------------------------------------------------- coding
    def encode(self, var: str, value: Any) -> int:
        dom = self.model.domains[var]
        for k, d in enumerate(dom):
            if d == value:
                return k
        raise ValueOutOfDomain(var, value, dom)

    def _encode_result(self, i, val, dom):
        for k, d in enumerate(dom):
            if d == val:
                return k
        raise ValueOutOfDomain(self.names[i], val, dom)

    def decode(self, values: Sequence[int]) -> dict[str, Any]:
        return {v: self.domains[i][values[i]] for i, v in enumerate(self.names)}

    def _make_lazy(self, i, eq, ps):
        memo: dict[tuple, int] = {}
        in_names = eq.inputs
        doms = [self.domains[p] for p in ps]
        out_dom = self.domains[i]

        def f(values):
            key = tuple(values[p] for p in ps)
            r = memo.get(key)
            if r is None:
                env = {n: doms[j][key[j]] for j, n in enumerate(in_names)}
                r = memo[key] = self._encode_result(i, eq.compute(env), out_dom)
            return r

        return f

    # ----------------------------------------------------------------- solving
    def solve(self, forced: Mapping[int, int] = ()) -> list[int]:
        self.solves += 1
        values = list(self.base_values)
        if self.dense:
            fa = [-1] * self.n
            for k, v in dict(forced).items():
                fa[k] = v
            va = _iarray(values)
            self.kernels.solve(*self._arrays, va, _iarray(fa))
            return va.tolist()
        forced = dict(forced)
        pstart, pcount, parents, strides, tstart, table = (
            self._pstart, self._pcount, self._parents, self._strides, self._tstart, self._table)
        for v in self.topo:
            f = forced.get(v)
            if f is not None:
                values[v] = f
            elif v in self._lazy:
                values[v] = self._lazy[v](values)
            else:
                idx = 0
                s = pstart[v]
                for j in range(s, s + pcount[v]):
                    idx += values[parents[j]] * strides[j]
                values[v] = table[tstart[v] + idx]
        return values

    def set_phi(self, phi_vars: Sequence[int], fn: Callable[[Sequence[int]], bool]) -> None:
        """Install the outcome formula as a dense 0/1 table over ``phi_vars``."""
        sizes = [len(self.domains[p]) for p in phi_vars]
        st, stride = [], 1
        for s in reversed(sizes):
            st.append(stride)
            stride *= s
        st.reverse()
        tab = []
        scratch = [0] * self.n
        for key in itertools.product(*(range(s) for s in sizes)):
            for p, k in zip(phi_vars, key):
                scratch[p] = k
            tab.append(1 if fn(scratch) else 0)
        self._phi = (_iarray(phi_vars), _iarray(st), _iarray(tab))

    def phi(self, values: Sequence[int]) -> bool:
        pv, ps, pt = self._phi
        idx = 0
        for j in range(len(pv)):
            idx += values[pv[j]] * ps[j]
        return bool(pt[idx])

    def phi_under(self, forced: Mapping[int, int]) -> bool:
        if self.dense:
            self.solves += 1
            fa = [-1] * self.n
            for k, v in forced.items():
                fa[k] = v
            return bool(self.kernels.solve_phi(*self._arrays, _iarray(self.base_values), _iarray(fa),
                                               *self._phi))
        return self.phi(self.solve(forced))

    def ac2b(self, base_forced: Mapping[int, int], bits: Sequence[tuple[int, int]]) -> int:
        """First subset mask of ``bits`` (layered over ``base_forced``) falsifying phi, or -1."""
        nb = len(bits)
        if self.dense:
            self.solves += 1 << nb
            bf = [-1] * self.n
            for k, v in base_forced.items():
                bf[k] = v
            return self.kernels.ac2b_sweep(
                *self._arrays, _iarray(self.base_values), _iarray(bf),
                _iarray([b[0] for b in bits]), _iarray([b[1] for b in bits]), nb,
                *self._phi, self._scratch_v, self._scratch_f)
        for mask in range(1 << nb):
            forced = dict(base_forced)
            for b in range(nb):
                if (mask >> b) & 1:
                    forced[bits[b][0]] = bits[b][1]
            if not self.phi(self.solve(forced)):
                return mask
        return -1
