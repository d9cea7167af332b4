"""Reference implementations used only by the tests.

Each oracle is written directly from the definitions with brute-force
enumeration, sharing no code with the library beyond the data types.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from causalverif.ltl.syntax import (Always, And, Atom, Bool, Eventually, Implies, Next, Not, Or, Until)


# ------------------------------------------------------------------- models


def fixpoint_solve(model, ctx, forced=None):
    """Iterate every equation from an arbitrary start until nothing changes."""
    forced = dict(forced or {})
    env = dict(ctx)
    for v in model.endogenous:
        env[v] = forced.get(v, model.domains[v][0])
    for _ in range(len(model.endogenous) + 2):
        changed = False
        for v in model.endogenous:
            new = forced[v] if v in forced else model.equations[v].compute(
                {p: env[p] for p in model.equations[v].inputs})
            if new != env[v]:
                env[v] = new
                changed = True
        if not changed:
            return env
    raise AssertionError("no fixpoint; model is not recursive")


def _subsets(xs):
    for r in range(len(xs) + 1):
        yield from itertools.combinations(xs, r)


class MemoSolver:
    """``fixpoint_solve`` for one model and context, cached per intervention."""

    def __init__(self, model, ctx):
        self.model, self.ctx, self.memo = model, ctx, {}

    def __call__(self, model, ctx, forced=None):
        key = tuple(sorted((forced or {}).items()))
        if key not in self.memo:
            self.memo[key] = fixpoint_solve(self.model, self.ctx, dict(key))
        return self.memo[key]


def brute_witness_size(model, ctx, cause: dict, phi, max_w=None, solve=None):
    """Minimum |W| over all (W, w, x') satisfying AC2, or None.

    ``phi`` is a predicate on the full solution dict. W ranges over every subset of
    the other endogenous variables and every value vector, with no pruning.
    """
    fixpoint_solve = solve or MemoSolver(model, ctx)
    actual = fixpoint_solve(model, ctx)
    xs = list(cause)
    others = [v for v in model.endogenous if v not in cause]
    alts = [dict(zip(xs, a)) for a in itertools.product(*(model.domains[x] for x in xs))
            if any(a[k] != cause[x] for k, x in enumerate(xs))]
    for W in _subsets(others):
        if max_w is not None and len(W) > max_w:
            return None
        Z = [v for v in others if v not in W]
        for wv in itertools.product(*(model.domains[w] for w in W)):
            w = dict(zip(W, wv))
            if not any(not phi(fixpoint_solve(model, ctx, {**alt, **w})) for alt in alts):
                continue
            ok = True
            for Wp in _subsets(W):
                for Zp in _subsets(Z):
                    forced = dict(cause)
                    forced.update({k: w[k] for k in Wp})
                    forced.update({z: actual[z] for z in Zp})
                    if not phi(fixpoint_solve(model, ctx, forced)):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return len(W)
    return None


def brute_is_cause(model, ctx, cause: dict, phi, solve=None):
    """``(is_cause, responsibility)`` from the definitions by exhaustive search."""
    solve = solve or MemoSolver(model, ctx)
    actual = solve(model, ctx)
    if not phi(actual) or any(actual[x] != v for x, v in cause.items()):
        return False, Fraction(0)
    k = brute_witness_size(model, ctx, cause, phi, solve=solve)
    if k is None:
        return False, Fraction(0)
    for r in range(1, len(cause)):
        for sub in itertools.combinations(sorted(cause), r):
            if brute_witness_size(model, ctx, {x: cause[x] for x in sub}, phi, solve=solve) is not None:
                return False, Fraction(0)
    return True, Fraction(1, k + 1)


# ---------------------------------------------------------------------- LTL


def word_positions(n, loop, i):
    if loop is None:
        return list(range(i, n))
    out = list(range(i, n))
    if loop < i:
        out += list(range(loop, i))
    return out


def ltl_holds(f, rows, signals, loop, i=0):
    """Direct recursive semantics over a finite or lasso word of label rows."""
    n = len(rows)
    rec = lambda g, j: ltl_holds(g, rows, signals, loop, j)
    if isinstance(f, Atom):
        return bool(rows[i][signals.index(f.name)])
    if isinstance(f, Bool):
        return f.value
    if isinstance(f, Not):
        return not rec(f.arg, i)
    if isinstance(f, And):
        return rec(f.left, i) and rec(f.right, i)
    if isinstance(f, Or):
        return rec(f.left, i) or rec(f.right, i)
    if isinstance(f, Implies):
        return (not rec(f.left, i)) or rec(f.right, i)
    if isinstance(f, Next):
        if i + 1 < n:
            return rec(f.arg, i + 1)
        return loop is not None and rec(f.arg, loop)
    pos = word_positions(n, loop, i)
    if isinstance(f, Eventually):
        return any(rec(f.arg, j) for j in pos)
    if isinstance(f, Always):
        return all(rec(f.arg, j) for j in pos)
    if isinstance(f, Until):
        for j in pos:
            if rec(f.right, j):
                return True
            if not rec(f.left, j):
                return False
        return False
    raise TypeError(f)


def lassos(k, max_len):
    """Every lasso (state path, loop index) from an initial state with path length <= max_len."""
    def extend(path):
        last = path[-1]
        for t in k.successors(last):
            for idx, s in enumerate(path):
                if s == t:
                    yield tuple(path), idx
        if len(path) < max_len:
            for t in k.successors(last):
                yield from extend(path + [t])

    for s0 in k.initial:
        yield from extend([s0])


def bounded_lasso_holds(k, f, max_len=None):
    """``(holds, failing_lasso)`` over every lasso of length <= ``max_len`` (default 2|S|)."""
    max_len = max_len or 2 * len(k.states)
    sig = list(k.alphabet)
    for path, loop in lassos(k, max_len):
        rows = [tuple(int(a in k.labels[s]) for a in sig) for s in path]
        if not ltl_holds(f, rows, sig, loop):
            return False, (path, loop)
    return True, None


def relabel(k, flips):
    labels = {s: set(k.labels[s]) for s in k.states}
    for s, a in flips:
        labels[s] ^= {a}
    return k.with_labels(labels)


def brute_coverage(k, f, pairs, check=None):
    """Per pair: ``(covered, is_cause, responsibility)`` via minimal falsifying flip sets."""
    check = check or (lambda kk: bounded_lasso_holds(kk, f)[0])
    fails = {}
    for R in _subsets(pairs):
        fails[frozenset(R)] = not check(relabel(k, R))
    out = {}
    for x in pairs:
        covered = fails[frozenset([x])]
        best = None
        for R, bad in fails.items():
            if x not in R or not bad:
                continue
            rest = R - {x}
            if any(fails[frozenset(S)] for S in _subsets(sorted(rest))):
                continue
            if best is None or len(R) < best:
                best = len(R)
        out[x] = (covered, best is not None, Fraction(1, best) if best else Fraction(0))
    return out


def occurrence_list(f):
    """Preorder ``(path, sub, polarity)`` written independently of the library."""
    out = []

    def go(g, path, pol):
        out.append((path, g, pol))
        if isinstance(g, (Not,)):
            go(g.arg, path + (0,), -pol)
        elif isinstance(g, (Next, Eventually, Always)):
            go(g.arg, path + (0,), pol)
        elif isinstance(g, Implies):
            go(g.left, path + (0,), -pol)
            go(g.right, path + (1,), pol)
        elif isinstance(g, (And, Or, Until)):
            go(g.left, path + (0,), pol)
            go(g.right, path + (1,), pol)

    go(f, (), 1)
    return out


def substitute(f, path, new):
    if not path:
        return new
    h, rest = path[0], path[1:]
    if isinstance(f, (Not, Next, Eventually, Always)):
        return type(f)(substitute(f.arg, rest, new))
    if h == 0:
        return type(f)(substitute(f.left, rest, new), f.right)
    return type(f)(f.left, substitute(f.right, rest, new))


# ------------------------------------------------------------------ explain


def brute_explain(trace, f):
    """Singleton failure causes: points lying in some minimal repairing flip set."""
    sig = list(trace.signals)
    used = sorted({a.name for a in _atoms(f)} & set(sig))
    pts = [(s, c) for s in used for c in range(trace.length)]

    def holds(flips):
        rows = [list(r) for r in trace.cycles]
        for s, c in flips:
            rows[c][sig.index(s)] ^= 1
        return ltl_holds(f, rows, sig, trace.loop_start)

    repairs = [frozenset(R) for R in _subsets(pts) if holds(R)]
    minimal = [R for R in repairs if not any(S < R for S in repairs)]
    out = {}
    for R in minimal:
        for p in R:
            q = Fraction(1, len(R))
            out[p] = max(out.get(p, Fraction(0)), q)
    return out


def _atoms(f):
    if isinstance(f, Atom):
        yield f
    for name in ("arg", "left", "right"):
        if hasattr(f, name):
            yield from _atoms(getattr(f, name))


# ---------------------------------------------------------------------- STE


def bool_gate(typ, vals):
    if typ == "AND":
        return int(all(vals))
    if typ == "OR":
        return int(any(vals))
    if typ == "NAND":
        return 1 - int(all(vals))
    if typ == "NOR":
        return 1 - int(any(vals))
    if typ == "XOR":
        return sum(vals) % 2
    if typ == "NOT":
        return 1 - vals[0]
    if typ == "BUF":
        return vals[0]
    if typ == "MUX":
        return vals[2] if vals[0] else vals[1]
    if typ == "CONST0":
        return 0
    if typ == "CONST1":
        return 1
    raise ValueError(typ)


def bool_eval(circuit_dict, inputs):
    nodes = {n["name"]: n for n in circuit_dict["nodes"]}
    memo = dict(inputs)

    def val(n):
        if n not in memo:
            d = nodes[n]
            memo[n] = bool_gate(d["type"], [val(i) for i in d.get("inputs", [])])
        return memo[n]

    return {n: val(n) for n in nodes}


def completions(assign):
    xs = sorted(n for n, v in assign.items() if v == "X")
    for bits in itertools.product((0, 1), repeat=len(xs)):
        yield {**assign, **dict(zip(xs, bits))}


def determined_brute(circuit_dict, assign, output, known):
    """Output fixed across all X-inputs outside ``known`` for every setting of ``known``?

    Uses ternary semantics: unknown inputs stay X and the output must be non-X.
    """
    from causalverif.ste import TernaryCircuit, ternary_eval

    c = TernaryCircuit.from_dict(circuit_dict)
    ks = sorted(known)
    for bits in itertools.product((0, 1), repeat=len(ks)):
        a = {**assign, **dict(zip(ks, bits))}
        if ternary_eval(c, a)[output] == "X":
            return False
    return True


def brute_knownness(circuit_dict, assign, output, xs):
    """Responsibility of each X-input: ``1/|D|`` for the smallest minimal determining set D containing it."""
    det = {frozenset(S): determined_brute(circuit_dict, assign, output, S) for S in _subsets(xs)}
    minimal = [S for S, d in det.items() if d and not any(det[frozenset(T)] for T in _subsets(sorted(S))
                                                         if frozenset(T) != S)]
    out = {}
    for n in xs:
        sizes = [len(S) for S in minimal if n in S]
        out[n] = Fraction(1, min(sizes)) if sizes else Fraction(0)
    return out
