import random
from fractions import Fraction

import pytest

from causalverif.coverage import (Mutation, causal_coverage, coverage_check, mutate, mutate_many,
                                  vacuity_check)
from causalverif.errors import CapExceeded, SpecificationFails, UnknownAtom, UnknownState
from causalverif.generate import random_kripke, random_ltl
from causalverif.ltl import KripkeStructure, check_structure, load_kripke, parse_ltl
from oracles import bounded_lasso_holds, brute_coverage, occurrence_list, substitute

REQ_GRANT = parse_ltl("G(req -> F grant)")


@pytest.fixture
def rg(data):
    return load_kripke(data("req_grant.json"))


def test_mutate_flips_and_is_an_involution(rg):
    m = mutate(rg, Mutation("s2", "grant"))
    assert "grant" not in m.labels["s2"] and m.edges == rg.edges
    assert mutate(m, Mutation("s2", "grant")) == rg
    assert "req" in mutate(rg, Mutation("s4", "req")).labels["s4"]
    assert "grant" in rg.labels["s2"]


def test_mutate_errors(rg):
    with pytest.raises(UnknownState):
        mutate(rg, Mutation("nope", "grant"))
    with pytest.raises(UnknownAtom):
        mutate(rg, Mutation("s1", "ack"))


def test_req_grant_counterfactual_coverage_is_empty(rg):
    assert coverage_check(rg, REQ_GRANT, "grant").covered_states() == []


def test_req_grant_causal_coverage(rg):
    rep = causal_coverage(rg, REQ_GRANT, "grant")
    causes = {e.state: e for e in rep.causes()}
    assert sorted(causes) == ["s1", "s2", "s3"]
    for s, e in causes.items():
        assert e.responsibility == Fraction(1, 3)
        assert {m.state for m in e.witness_mutations} == {"s1", "s2", "s3"} - {s}


def test_witness_revalidates(rg):
    for e in causal_coverage(rg, REQ_GRANT, "grant").causes():
        base = mutate_many(rg, e.witness_mutations)
        assert check_structure(base, REQ_GRANT).holds
        assert not check_structure(mutate(base, Mutation(e.state, e.atom)), REQ_GRANT).holds


def test_single_state_is_covered():
    k = KripkeStructure(["s"], ["s"], [("s", "s")], {"s": ["q"]})
    f = parse_ltl("G q")
    assert coverage_check(k, f, "q").covered_states() == ["s"]
    e = causal_coverage(k, f, "q").entry("s", "q")
    assert e.covered and e.responsibility == 1 and e.witness_mutations == ()


def test_failing_spec_is_rejected(rg):
    with pytest.raises(SpecificationFails):
        coverage_check(rg, parse_ltl("G grant"), "grant")
    with pytest.raises(SpecificationFails):
        vacuity_check(rg, parse_ltl("G grant"))


def test_cap(rg):
    with pytest.raises(CapExceeded):
        causal_coverage(rg, REQ_GRANT, None, all_atoms=True, cap=4)


def test_gpq_vacuity_and_causes(data):
    k = load_kripke(data("gpq.json"))
    f = parse_ltl("G(p | q)")
    vac = {e.text: e.vacuous for e in vacuity_check(k, f).entries}
    assert vac == {"p | q": False, "p": True, "q": True}
    rep = causal_coverage(k, f, None)
    assert [(e.atom, e.responsibility) for e in rep.causes()] == [("p", Fraction(1, 2)), ("q", Fraction(1, 2))]


def test_g_p_not_vacuous_in_p():
    k = KripkeStructure(["a", "b"], ["a"], [("a", "b"), ("b", "a")], {"a": ["p"], "b": ["p"]})
    (e,) = vacuity_check(k, parse_ltl("G p")).entries
    assert e.text == "p" and not e.vacuous


def test_negative_occurrence_uses_true():
    k = KripkeStructure(["a"], ["a"], [("a", "a")], {"a": ["q"]}, ["p", "q"])
    entries = vacuity_check(k, parse_ltl("G(p -> q)")).entries
    p_occ = [e for e in entries if e.text == "p"][0]
    assert p_occ.polarity == -1 and p_occ.replaced_with.value is True and p_occ.vacuous


def _passing_instance(rng):
    while True:
        k = random_kripke(rng, 3, ("p", "q"))
        f = random_ltl(rng, ["p", "q"], 3)
        if check_structure(k, f).holds:
            return k, f


@pytest.mark.parametrize("seed", range(40))
def test_coverage_matches_recheck_oracle(seed):
    rng = random.Random(seed)
    k, f = _passing_instance(rng)
    atom = rng.choice(["p", "q"])
    pairs = [(s, atom) for s in k.states]
    expected = brute_coverage(k, f, pairs)
    rep = causal_coverage(k, f, atom)
    for e in rep.entries:
        assert (e.covered, e.is_cause, e.responsibility) == expected[(e.state, e.atom)]
        if e.covered:
            assert e.responsibility == 1


@pytest.mark.parametrize("seed", range(40))
def test_vacuity_matches_recheck_oracle(seed):
    rng = random.Random(500 + seed)
    k, f = _passing_instance(rng)
    rep = vacuity_check(k, f)
    expected = []
    for path, sub, pol in occurrence_list(f):
        if not path or type(sub).__name__ == "Bool":
            continue
        repl = parse_ltl("false" if pol > 0 else "true")
        expected.append((path, bounded_lasso_holds(k, substitute(f, path, repl))[0]))
    assert [(e.path, e.vacuous) for e in rep.entries] == expected
