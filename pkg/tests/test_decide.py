import random

import pytest
from hypothesis import given, settings

from n4ck.decide import (Refuted, Valid, abstract_conditionals, decide_cl, decide_il, decide_n4)
from n4ck.kripke import validate
from n4ck.search import Certificate, Exhausted, SearchBudget, find_countermodel, random_formula
from n4ck.semantics import IllFormed, holds_pair
from n4ck.syntax import Atom, Imp, Or, p, parse

from conftest import N4_FORMULAS


def refuted_properly(verdict, gamma, phi):
    return (isinstance(verdict, Refuted) and validate(verdict.model) == []
            and holds_pair(verdict.model, verdict.world, gamma, [phi], "N4"))


@pytest.mark.parametrize("text", [
    "~~p0 <-> p0",
    "~(p0 -> p1) <-> (p0 /\\ ~p1)",
    "~(p0 /\\ p1) <-> (~p0 \\/ ~p1)",
    "~(p0 \\/ p1) <-> (~p0 /\\ ~p1)",
    "p0 -> (p1 -> p0)",
    "(p0 => p1) => (~p1 => ~p0)",
    "(p0 => p1) -> (p0 -> p1)",
    "p0 /\\ ~p0 -> p0",
])
def test_valid_examples(text):
    assert isinstance(decide_n4([], parse(text)), Valid)


@pytest.mark.parametrize("text", [
    "(p0 -> p1) -> (~p1 -> ~p0)",
    "~~(p0 -> p1) <-> ~(p0 /\\ ~p1)",
    "p0 \\/ ~p0",
    "(p0 -> p1) -> (p0 => p1)",
    "p0 /\\ ~p0 -> p1",
    "((p0 -> p1) -> p0) -> p0",
])
def test_refuted_examples(text):
    f = parse(text)
    assert refuted_properly(decide_n4([], f), [], f)


def test_contraposition_certificate_has_one_world():
    f = parse("(p0 -> p1) -> (~p1 -> ~p0)")
    v = decide_n4([], f)
    assert v.model.size == 1


def test_excluded_middle_refuted_by_empty_world():
    v = decide_n4([], parse("p0 \\/ ~p0"))
    assert v.model.size == 1
    assert not v.model.vplus.get(p(0)) and not v.model.vminus.get(p(0))


def test_premises():
    assert isinstance(decide_n4([parse("p0"), parse("p0 -> p1")], p(1)), Valid)
    gamma = [parse("p0"), parse("~p0")]
    assert refuted_properly(decide_n4(gamma, p(1)), gamma, p(1))


def test_conditionals_rejected():
    with pytest.raises(IllFormed):
        decide_n4([], parse("p0 []-> p0"))


def test_abstraction_examples():
    fs, table = abstract_conditionals([parse("(p0 []-> p1) -> (p0 []-> p1)")])
    assert fs == [Imp(Atom(2), Atom(2))]
    assert table == {parse("p0 []-> p1"): Atom(2)}
    fs, table = abstract_conditionals([parse("~(p0 []-> p1)"), parse("p0 []-> p1")])
    a = table[parse("p0 []-> p1")]
    assert fs == [parse(f"~{a.name}"), a] and len(table) == 1


def test_abstraction_keeps_structure_outside_conditionals():
    fs, table = abstract_conditionals([parse("[]p0 /\\ (p1 <>-> p3)")])
    assert fs == [parse("p4 /\\ p5")]
    assert set(table) == {parse("[]p0"), parse("p1 <>-> p3")}


def test_brute_force_agreement_sample():
    rng = random.Random(99)
    budget = SearchBudget(max_worlds=3)
    for _ in range(400):
        f = random_formula(rng, 4, [p(0), p(1), p(2)])
        verdict = decide_n4([], f)
        found = find_countermodel("N4", [], [f], budget)
        if isinstance(verdict, Valid):
            assert isinstance(found, Exhausted)
        else:
            assert refuted_properly(verdict, [], f)
            assert isinstance(found, Certificate) or verdict.model.size > 3


@settings(max_examples=200, deadline=None)
@given(N4_FORMULAS, N4_FORMULAS)
def test_disjunction_property_spot_check(tau, psi):
    valid_tau = Imp(tau, tau)
    assert isinstance(decide_n4([], Or(valid_tau, psi)), Valid)
    assert isinstance(decide_n4([], valid_tau), Valid)


@settings(max_examples=200, deadline=None)
@given(N4_FORMULAS)
def test_double_negation_always_valid(f):
    assert isinstance(decide_n4([], parse(f"~~({_txt(f)}) <-> ({_txt(f)})")), Valid)


def _txt(f):
    from n4ck.syntax import to_text
    return to_text(f)


def test_classical_and_intuitionistic_bases():
    assert decide_cl([], parse("p0 \\/ ~p0")) is None
    assert decide_cl([], parse("(p0 -> p1) -> (~p1 -> ~p0)")) is None
    row = decide_cl([], parse("p0 -> p1"))
    assert row == {p(0): True, p(1): False}
    assert isinstance(decide_il([], parse("(p0 -> p1) -> (~p1 -> ~p0)")), Valid)
    assert isinstance(decide_il([], parse("p0 /\\ ~p0 -> p1")), Valid)
    assert isinstance(decide_il([], parse("p0 \\/ ~p0")), Refuted)
    assert isinstance(decide_il([], parse("~~p0 -> p0")), Refuted)
