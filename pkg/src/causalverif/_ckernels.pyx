# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; signatures and semantics match ``_pykernels``."""

cdef enum:
    T0 = 0
    T1 = 1
    TX = 2

cdef enum:
    G_INPUT = 0
    G_AND = 1
    G_OR = 2
    G_NOT = 3
    G_XOR = 4
    G_MUX = 5
    G_BUF = 6
    G_NAND = 7
    G_NOR = 8
    G_CONST0 = 9
    G_CONST1 = 10

cdef enum:
    L_ATOM = 0
    L_TRUE = 1
    L_FALSE = 2
    L_NOT = 3
    L_AND = 4
    L_OR = 5
    L_IMPL = 6
    L_NEXT = 7
    L_F = 8
    L_G = 9
    L_U = 10

BACKEND = "cython"


cdef inline void _solve(int[:] topo, int[:] pstart, int[:] pcount, int[:] parents,
                        int[:] strides, int[:] tstart, int[:] table,
                        int[:] values, int[:] forced) noexcept nogil:
    cdef Py_ssize_t t, j, s
    cdef int v, idx
    for t in range(topo.shape[0]):
        v = topo[t]
        if forced[v] >= 0:
            values[v] = forced[v]
            continue
        idx = 0
        s = pstart[v]
        for j in range(s, s + pcount[v]):
            idx += values[parents[j]] * strides[j]
        values[v] = table[tstart[v] + idx]


cdef inline int _phi(int[:] values, int[:] phi_vars, int[:] phi_strides, int[:] phi_table) noexcept nogil:
    cdef Py_ssize_t j
    cdef int idx = 0
    for j in range(phi_vars.shape[0]):
        idx += values[phi_vars[j]] * phi_strides[j]
    return phi_table[idx]


def solve(int[:] topo, int[:] pstart, int[:] pcount, int[:] parents, int[:] strides,
          int[:] tstart, int[:] table, int[:] values, int[:] forced):
    _solve(topo, pstart, pcount, parents, strides, tstart, table, values, forced)


def phi_value(int[:] values, int[:] phi_vars, int[:] phi_strides, int[:] phi_table):
    return _phi(values, phi_vars, phi_strides, phi_table)


def solve_phi(int[:] topo, int[:] pstart, int[:] pcount, int[:] parents, int[:] strides,
              int[:] tstart, int[:] table, int[:] values, int[:] forced,
              int[:] phi_vars, int[:] phi_strides, int[:] phi_table):
    _solve(topo, pstart, pcount, parents, strides, tstart, table, values, forced)
    return _phi(values, phi_vars, phi_strides, phi_table)


def ac2b_sweep(int[:] topo, int[:] pstart, int[:] pcount, int[:] parents, int[:] strides,
               int[:] tstart, int[:] table, int[:] base_values, int[:] base_forced,
               int[:] bit_var, int[:] bit_val, int nbits,
               int[:] phi_vars, int[:] phi_strides, int[:] phi_table,
               int[:] values, int[:] forced):
    cdef long long mask, total = (<long long>1) << nbits
    cdef Py_ssize_t i, n = base_values.shape[0]
    cdef int b
    cdef long long found = -1
    with nogil:
        for mask in range(total):
            for i in range(n):
                values[i] = base_values[i]
                forced[i] = base_forced[i]
            for b in range(nbits):
                if (mask >> b) & 1:
                    forced[bit_var[b]] = bit_val[b]
            _solve(topo, pstart, pcount, parents, strides, tstart, table, values, forced)
            if not _phi(values, phi_vars, phi_strides, phi_table):
                found = mask
                break
    return found


cdef inline int _gate(int op, int[:] values, int[:] inputs, Py_ssize_t s, Py_ssize_t c) noexcept nogil:
    cdef int r, x, d0, d1
    cdef Py_ssize_t j
    if op == G_AND or op == G_NAND:
        r = T1
        for j in range(s, s + c):
            x = values[inputs[j]]
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
        for j in range(s, s + c):
            x = values[inputs[j]]
            if x == T1:
                r = T1
                break
            if x == TX:
                r = TX
        if op == G_NOR and r != TX:
            r = 1 - r
        return r
    if op == G_NOT:
        x = values[inputs[s]]
        return TX if x == TX else 1 - x
    if op == G_BUF:
        return values[inputs[s]]
    if op == G_XOR:
        r = 0
        for j in range(s, s + c):
            x = values[inputs[j]]
            if x == TX:
                return TX
            r ^= x
        return r
    if op == G_MUX:
        x = values[inputs[s]]
        d0 = values[inputs[s + 1]]
        d1 = values[inputs[s + 2]]
        if x == T0:
            return d0
        if x == T1:
            return d1
        return d0 if (d0 == d1 and d0 != TX) else TX
    if op == G_CONST0:
        return T0
    if op == G_CONST1:
        return T1
    return -1


cdef inline void _teval(int[:] ops, int[:] istart, int[:] icount, int[:] inputs, int[:] values) noexcept nogil:
    cdef Py_ssize_t v
    for v in range(ops.shape[0]):
        if ops[v] != G_INPUT:
            values[v] = _gate(ops[v], values, inputs, istart[v], icount[v])


def ternary_eval(int[:] ops, int[:] istart, int[:] icount, int[:] inputs, int[:] values):
    _teval(ops, istart, icount, inputs, values)


def ternary_determined(int[:] ops, int[:] istart, int[:] icount, int[:] inputs, int[:] base,
                       int[:] known, int nknown, int out, int[:] scratch):
    cdef long long mask, total = (<long long>1) << nknown
    cdef Py_ssize_t i, n = ops.shape[0]
    cdef int b, result = 1
    with nogil:
        for mask in range(total):
            for i in range(n):
                scratch[i] = base[i]
            for b in range(nknown):
                scratch[known[b]] = (mask >> b) & 1
            _teval(ops, istart, icount, inputs, scratch)
            if scratch[out] == TX:
                result = 0
                break
    return result


def ltl_eval(int[:] ops, int[:] arg_a, int[:] arg_b, int[:] atom_col, int[:] trace,
             int n_cycles, int n_signals, int loop_start, int[:] out):
    cdef Py_ssize_t k, i, base, a, b, c
    cdef int n = n_cycles, last = n_cycles - 1, op, acc, nxt, hold, rep
    cdef bint lasso = loop_start >= 0
    with nogil:
        for k in range(ops.shape[0]):
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
                    for rep in range(2):
                        for i in range(last, -1, -1):
                            nxt = out[base + (i + 1 if i < last else loop_start)]
                            out[base + i] = out[a + i] & nxt
                else:
                    acc = 1
                    for i in range(last, -1, -1):
                        acc = out[a + i] & acc
                        out[base + i] = acc
            else:
                if op == L_F:
                    b = a
                    a = -1
                if lasso:
                    for i in range(n):
                        out[base + i] = 0
                    for rep in range(2):
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
