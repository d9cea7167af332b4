"""Pure-Python hot kernels. ``_ckernels.pyx`` mirrors these signatures exactly.

All arrays are flat integer buffers (``array.array('i')``). Models are dense lookup
tables over value indices; circuits and formulas are flat op lists in topological
(post) order.
"""

# ternary values
T0, T1, TX = 0, 1, 2

# circuit ops
G_INPUT, G_AND, G_OR, G_NOT, G_XOR, G_MUX, G_BUF, G_NAND, G_NOR, G_CONST0, G_CONST1 = range(11)

# temporal ops
L_ATOM, L_TRUE, L_FALSE, L_NOT, L_AND, L_OR, L_IMPL, L_NEXT, L_F, L_G, L_U = range(11)

BACKEND = "python"


def solve(topo, pstart, pcount, parents, strides, tstart, table, values, forced):
    """Fill endogenous entries of ``values`` in topological order; ``forced[v] >= 0`` overrides."""
    for v in topo:
        f = forced[v]
        if f >= 0:
            values[v] = f
            continue
        idx = 0
        s = pstart[v]
        for j in range(s, s + pcount[v]):
            idx += values[parents[j]] * strides[j]
        values[v] = table[tstart[v] + idx]


def phi_value(values, phi_vars, phi_strides, phi_table):
    idx = 0
    for j in range(len(phi_vars)):
        idx += values[phi_vars[j]] * phi_strides[j]
    return phi_table[idx]


def solve_phi(topo, pstart, pcount, parents, strides, tstart, table, values, forced,
              phi_vars, phi_strides, phi_table):
    solve(topo, pstart, pcount, parents, strides, tstart, table, values, forced)
    return phi_value(values, phi_vars, phi_strides, phi_table)


def ac2b_sweep(topo, pstart, pcount, parents, strides, tstart, table, base_values, base_forced,
               bit_var, bit_val, nbits, phi_vars, phi_strides, phi_table, values, forced):
    """Check phi under every subset of the (var, value) bits layered on ``base_forced``.

    Returns -1 when phi holds under all ``2**nbits`` subsets, else the first failing mask.
    """
    n = len(base_values)
    for mask in range(1 << nbits):
        for i in range(n):
            values[i] = base_values[i]
            forced[i] = base_forced[i]
        for b in range(nbits):
            if (mask >> b) & 1:
                forced[bit_var[b]] = bit_val[b]
        solve(topo, pstart, pcount, parents, strides, tstart, table, values, forced)
        if not phi_value(values, phi_vars, phi_strides, phi_table):
            return mask
    return -1


def _gate(op, vals):
    if op == G_AND or op == G_NAND:
        r = T1
        for x in vals:
            if x == T0:
                r = T0
                break
            if x == TX:
                r = TX
        if op == G_NAND and r != TX:
            r = 1 - r
        return r
    if op == G_OR or op == G_NOR:
        r = T0
        for x in vals:
            if x == T1:
                r = T1
                break
            if x == TX:
                r = TX
        if op == G_NOR and r != TX:
            r = 1 - r
        return r
    if op == G_NOT:
        x = vals[0]
        return TX if x == TX else 1 - x
    if op == G_BUF:
        return vals[0]
    if op == G_XOR:
        r = 0
        for x in vals:
            if x == TX:
                return TX
            r ^= x
        return r
    if op == G_MUX:
        s, d0, d1 = vals[0], vals[1], vals[2]
        if s == T0:
            return d0
        if s == T1:
            return d1
        return d0 if d0 == d1 and d0 != TX else TX
    if op == G_CONST0:
        return T0
    if op == G_CONST1:
        return T1
    raise ValueError(op)


def ternary_eval(ops, istart, icount, inputs, values):
    """Evaluate every non-input node in index order (indices are topological)."""
    for v in range(len(ops)):
        op = ops[v]
        if op == G_INPUT:
            continue
        s = istart[v]
        values[v] = _gate(op, [values[inputs[j]] for j in range(s, s + icount[v])])


def ternary_determined(ops, istart, icount, inputs, base, known, nknown, out, scratch):
    """1 iff ``out`` is non-X for every Boolean assignment of the ``known`` input nodes."""
    n = len(ops)
    for mask in range(1 << nknown):
        for i in range(n):
            scratch[i] = base[i]
        for b in range(nknown):
            scratch[known[b]] = (mask >> b) & 1
        ternary_eval(ops, istart, icount, inputs, scratch)
        if scratch[out] == TX:
            return 0
    return 1


def ltl_eval(ops, arg_a, arg_b, atom_col, trace, n_cycles, n_signals, loop_start, out):
    """Truth table ``out[node * n_cycles + i]`` of every subformula at every cycle.

    ``loop_start < 0`` selects finite-trace semantics, otherwise lasso semantics with
    the last cycle's successor being ``loop_start``.
    """
    n = n_cycles
    last = n - 1
    lasso = loop_start >= 0
    for k in range(len(ops)):
        op = ops[k]
        base = k * n
        a = arg_a[k] * n
        b = arg_b[k] * n
        if op == L_ATOM:
            c = atom_col[k]
            for i in range(n):
                out[base + i] = trace[i * n_signals + c]
        elif op == L_TRUE:
            for i in range(n):
                out[base + i] = 1
        elif op == L_FALSE:
            for i in range(n):
                out[base + i] = 0
        elif op == L_NOT:
            for i in range(n):
                out[base + i] = 1 - out[a + i]
        elif op == L_AND:
            for i in range(n):
                out[base + i] = out[a + i] & out[b + i]
        elif op == L_OR:
            for i in range(n):
                out[base + i] = out[a + i] | out[b + i]
        elif op == L_IMPL:
            for i in range(n):
                out[base + i] = (1 - out[a + i]) | out[b + i]
        elif op == L_NEXT:
            for i in range(last):
                out[base + i] = out[a + i + 1]
            out[base + last] = out[a + loop_start] if lasso else 0
        elif op == L_G:
            if lasso:
                for i in range(n):
                    out[base + i] = 1
                for _ in range(2):
                    for i in range(last, -1, -1):
                        nxt = out[base + (i + 1 if i < last else loop_start)]
                        out[base + i] = out[a + i] & nxt
            else:
                acc = 1
                for i in range(last, -1, -1):
                    acc = out[a + i] & acc
                    out[base + i] = acc
        else:  # L_F and L_U share the least-fixpoint recurrence
            if op == L_F:
                b, a = a, -1
            if lasso:
                for i in range(n):
                    out[base + i] = 0
                for _ in range(2):
                    for i in range(last, -1, -1):
                        nxt = out[base + (i + 1 if i < last else loop_start)]
                        hold = 1 if a < 0 else out[a + i]
                        out[base + i] = out[b + i] | (hold & nxt)
            else:
                acc = 0
                for i in range(last, -1, -1):
                    hold = 1 if a < 0 else out[a + i]
                    acc = out[b + i] | (hold & acc)
                    out[base + i] = acc
