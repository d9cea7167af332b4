import random
from array import array

import pytest

from causalverif import _backend, _pykernels
from causalverif.cause import check_cause
from causalverif.generate import random_binary_model, random_circuit, random_ltl, random_trace
from causalverif.ltl.trace import TraceProgram
from causalverif.model import evaluate
from causalverif.ste import ternary_eval

BACKENDS = _backend.available()
compiled = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernels not built")


def test_backend_selection_reports_a_name():
    assert _backend.BACKEND in BACKENDS
    assert _pykernels.BACKEND == "python"


@compiled
@pytest.mark.parametrize("seed", range(30))
def test_causal_search_agrees(seed):
    rng = random.Random(seed)
    m = random_binary_model(rng, 5)
    sol = evaluate(m, "c")
    v = m.endogenous[-1]
    for x in m.endogenous:
        reps = [check_cause(m, "c", {x: sol[x]}, f"{v}={sol[v]}", kernels=k) for k in BACKENDS.values()]
        assert len({(r.is_cause, r.responsibility, r.witness and r.witness.contingency_vars) for r in reps}) == 1


@compiled
@pytest.mark.parametrize("seed", range(30))
def test_ltl_tables_agree(seed):
    rng = random.Random(seed)
    t = random_trace(rng, ["p", "q"], rng.randint(1, 7))
    f = random_ltl(rng, ["p", "q"], 4)
    flat = array("i", [v for row in t.cycles for v in row])
    tabs = [TraceProgram(f, t.signals, k).table(flat, t.length, t.loop_start).tolist() for k in BACKENDS.values()]
    assert tabs[0] == tabs[1]


@compiled
@pytest.mark.parametrize("seed", range(20))
def test_ternary_agrees(seed):
    rng = random.Random(seed)
    c, a = random_circuit(rng, 8, 12)
    assert ternary_eval(c, a, BACKENDS["python"]) == ternary_eval(c, a, BACKENDS["cython"])
