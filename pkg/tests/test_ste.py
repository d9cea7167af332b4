import itertools
import random
from fractions import Fraction

import pytest

from causalverif.errors import CapExceeded, CircuitError, OutputAlreadyDetermined
from causalverif.generate import random_circuit
from causalverif.ste import (X, TernaryCircuit, benchmark, load_netlist, refine, responsibility_order,
                             structural_score, ternary_eval, unroll)
from oracles import bool_eval, brute_knownness, completions


def circ(nodes, out):
    return TernaryCircuit.from_dict({"nodes": nodes, "outputs": [out]})


def inputs(*names):
    return [{"name": n, "type": "INPUT"} for n in names]


AND2 = circ(inputs("n1", "n2") + [{"name": "g", "type": "AND", "inputs": ["n1", "n2"]}], "g")
MUX = circ(inputs("s", "d0", "d1") + [{"name": "m", "type": "MUX", "inputs": ["s", "d0", "d1"]}], "m")


@pytest.mark.parametrize("typ, vals, want", [
    ("AND", (0, X), 0), ("AND", (1, X), X), ("OR", (1, X), 1), ("OR", (0, X), X),
    ("XOR", (1, X), X), ("NAND", (0, X), 1), ("NOR", (1, X), 0),
])
def test_gate_tables(typ, vals, want):
    c = circ(inputs("a", "b") + [{"name": "g", "type": typ, "inputs": ["a", "b"]}], "g")
    assert ternary_eval(c, {"a": vals[0], "b": vals[1]})["g"] == want


def test_not_and_mux():
    c = circ(inputs("a") + [{"name": "g", "type": "NOT", "inputs": ["a"]}], "g")
    assert ternary_eval(c, {"a": X})["g"] == X
    assert ternary_eval(MUX, {"s": X, "d0": 1, "d1": 1})["m"] == 1
    assert ternary_eval(MUX, {"s": X, "d0": 0, "d1": 1})["m"] == X


def test_structural_errors():
    with pytest.raises(CircuitError):
        circ(inputs("a") + [{"name": "g", "type": "AND", "inputs": ["a"]}], "g")
    with pytest.raises(CircuitError):
        circ([{"name": "g", "type": "OR", "inputs": ["h", "h"]}, {"name": "h", "type": "NOT", "inputs": ["g"]}], "g")
    with pytest.raises(CircuitError):
        circ(inputs("a", "a"), "a")
    with pytest.raises(CircuitError):
        circ(inputs("a") + [{"name": "r", "type": "LATCH", "inputs": ["a"]}], "r")


@pytest.mark.parametrize("seed", range(25))
def test_x_free_matches_boolean(seed):
    rng = random.Random(seed)
    c, _ = random_circuit(rng, 6, 10)
    d = c.to_dict()
    for bits in itertools.product((0, 1), repeat=len(c.inputs)):
        a = dict(zip(c.inputs, bits))
        assert ternary_eval(c, a) == bool_eval(d, a)


@pytest.mark.parametrize("seed", range(25))
def test_refinement_is_monotone(seed):
    rng = random.Random(seed)
    c, a = random_circuit(rng, 8, 12)
    a = c.complete(a)
    before = ternary_eval(c, a)
    while any(v == X for v in a.values()):
        n = rng.choice([k for k, v in a.items() if v == X])
        a[n] = rng.randint(0, 1)
        after = ternary_eval(c, a)
        assert all(after[k] == v for k, v in before.items() if v != X)
        before = after


def test_and_order_and_refine():
    (top,) = responsibility_order(AND2, {"n2": 1}, "g")
    assert top.node == "n1" and top.score == 1
    tr = refine(AND2, {"n2": 1}, "g")
    assert tr.instantiations == 1 and sorted(v for _, v in tr.leaves) == [0, 1]


def test_or_tree_symmetry(data):
    c, _ = load_netlist(data("or_tree.json"))
    order = responsibility_order(c, {}, "out")
    assert [s.node for s in order] == ["a", "b", "c", "d"]
    assert len({s.score for s in order}) == 1


def test_mux_select_first():
    order = responsibility_order(MUX, {"d0": 0, "d1": 1}, "m")
    assert order[0].node == "s"
    full = responsibility_order(MUX, {}, "m")
    assert full[0].node in {"d0", "d1", "s"}
    r = refine(MUX, {"d0": 0, "d1": 1}, "m")
    assert r.steps[0].node == "s"
    assert r.instantiations <= refine(MUX, {"d0": 0, "d1": 1}, "m", "topo").instantiations


def test_already_determined():
    with pytest.raises(OutputAlreadyDetermined):
        responsibility_order(AND2, {"n1": 0}, "g")
    with pytest.raises(OutputAlreadyDetermined):
        refine(AND2, {"n1": 0}, "g")


@pytest.mark.parametrize("seed", range(20))
def test_scores_match_brute_force(seed):
    rng = random.Random(seed)
    c, a = random_circuit(rng, 6, 9)
    a = c.complete(a)
    out = c.outputs[0]
    xs = [n for n in c.cone_inputs(out) if a[n] == X]
    ref = brute_knownness(c.to_dict(), a, out, xs)
    got = {s.node: s.score for s in responsibility_order(c, a, out)}
    assert got == {n: v for n, v in ref.items() if v > 0}
    assert all(0 < v <= 1 for v in got.values()) and got


@pytest.mark.parametrize("seed", range(15))
def test_refine_declares_correct_values(seed):
    rng = random.Random(seed)
    c, a = random_circuit(rng, 8, 12)
    a = c.complete(a)
    out = c.outputs[0]
    for strategy in ("responsibility", "topo", "random"):
        tr = refine(c, a, out, strategy, seed=seed)
        assert all(a[st.node] == X for st in tr.steps)
        for branch, value in tr.leaves:
            b = {**a, **dict(branch)}
            assert {bool_eval(c.to_dict(), full)[out] for full in completions(b)} == {value}


def test_fallback_above_cap():
    names = [f"i{k}" for k in range(4)]
    c = circ(inputs(*names) + [{"name": "o", "type": "AND", "inputs": names}], "o")
    with pytest.raises(CapExceeded):
        responsibility_order(c, {}, "o", cap=3, fallback=False)
    approx = responsibility_order(c, {}, "o", cap=3)
    assert all(not s.exact and s.score == Fraction(1, 4) for s in approx)
    assert structural_score(AND2, AND2.complete({"n2": 1}), "g", "n1") == 1


def test_unroll_shift_register(data):
    c, init = load_netlist(data("shift2.json"), 3)
    assert init == {"r1@0": X, "r2@0": X}
    values = ternary_eval(c, {**init, "in@0": 1})
    assert values["out@2"] == 1 and values["out@1"] == X
    with pytest.raises(CircuitError):
        unroll({"nodes": [], "outputs": []}, 0)


def test_benchmark_is_deterministic():
    r1, m1 = benchmark(5, 4)
    r2, m2 = benchmark(5, 4)
    assert m1 == m2 and [r.counts for r in r1] == [r.counts for r in r2]
