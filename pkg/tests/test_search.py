import random

import pytest

from n4ck.decide import Refuted, decide_n4
from n4ck.kripke import BiSet, CondNelsonModel, dumps, validate
from n4ck.proofs import SCHEMAS
from n4ck.search import (Certificate, Exhausted, SearchBudget, candidate_relations, enumerate_formulas,
                         find_countermodel, preorders, random_formula, rooted_preorders, sample_model,
                         verify_certificate)
from n4ck.semantics import IllFormed
from n4ck.syntax import Neg, apply_subst, p, parse

LETTERS = [p(0), p(1), p(2)]
INSTANCE = {"phi": p(0), "psi": p(1), "chi": p(2)}


def test_budget_needs_a_world():
    with pytest.raises(ValueError):
        SearchBudget(max_worlds=0)


def test_preorder_counts():
    # preorders up to isomorphism on 1, 2, 3, 4 points
    assert [len(preorders(n)) for n in (1, 2, 3, 4)] == [1, 3, 9, 33]
    assert all(len(rooted_preorders(n)) <= len(preorders(n)) for n in (1, 2, 3))


def test_candidate_relations_satisfy_frame_conditions():
    for up in preorders(2):
        for succ in candidate_relations(2, up):
            leq = {(a, b) for a in range(2) for b in range(2) if up[a] >> b & 1}
            rel = {(a, b) for a in range(2) for b in range(2) if succ[a] >> b & 1}
            m = CondNelsonModel.build(2, leq, relations={BiSet.of((), ()): rel})
            assert validate(m) == []


def test_contraposition_one_world():
    f = parse("(p0 -> p1) -> (~p1 -> ~p0)")
    c = find_countermodel("N4", [], [f], SearchBudget(max_worlds=1))
    assert isinstance(c, Certificate) and c.model.size == 1
    assert verify_certificate(c)


def test_converse_pairs_found():
    budget = SearchBudget(max_worlds=3)
    for g, d in (("(p1 /\\ ~p2) []-> p3", "~(p1 -> p2) []-> p3"),
                 ("~(p1 /\\ ~p2) []-> p3", "(p1 -> p2) []-> p3")):
        c = find_countermodel("N4CK", [parse(g)], [parse(d)], budget)
        assert isinstance(c, Certificate)
        assert verify_certificate(c)


def test_hand_built_converse_certificate():
    m = CondNelsonModel.build(1, [(0, 0)], {p(1): {0}}, {p(1): {0}, p(2): {0}},
                              relations={BiSet.of({0}, ()): {(0, 0)}})
    c = Certificate(m, 0, (parse("(p1 /\\ ~p2) []-> p3"),), (parse("~(p1 -> p2) []-> p3"),), "N4CK")
    assert verify_certificate(c)


def test_deleting_a_load_bearing_pair_breaks_the_certificate():
    c = find_countermodel("N4CK", [parse("(p1 /\\ ~p2) []-> p3")], [parse("~(p1 -> p2) []-> p3")],
                          SearchBudget(max_worlds=3))
    m = c.model
    broken = 0
    for ti, table in enumerate(m.tables):
        for ei, (key, rel) in enumerate(table.entries):
            for pair in sorted(rel):
                entries = list(table.entries)
                entries[ei] = (key, rel - {pair})
                tables = list(m.tables)
                tables[ti] = type(table)(tuple(entries), table.plus_domain, table.minus_domain)
                mutant = CondNelsonModel(m.size, m.leq, m.vplus, m.vminus, tuple(tables))
                if not verify_certificate(Certificate(mutant, c.world, c.gamma, c.delta, c.logic)):
                    broken += 1
    # the refuted conditional needs at least one successor, so some deletion is fatal
    assert broken >= 1


@pytest.mark.parametrize("name", ["A1", "A2", "A3", "A4"])
def test_axioms_have_no_small_countermodel(name):
    f = apply_subst(SCHEMAS[name], INSTANCE)
    assert isinstance(find_countermodel("N4CK", [], [f], SearchBudget(max_worlds=2)), Exhausted)


def test_a4_exhausted_at_three_worlds():
    f = parse("p0 []-> (p1 -> p1)")
    got = find_countermodel("N4CK", [], [f], SearchBudget(max_worlds=3))
    assert isinstance(got, Exhausted)
    assert "at most 3 worlds" in str(got)


@pytest.mark.parametrize("name", ["a1", "a2", "a3", "a4", "a5", "a6"])
def test_modal_axioms_have_no_small_countermodel(name):
    f = apply_subst(SCHEMAS[name], INSTANCE, partial=True)
    assert isinstance(find_countermodel("FSKd", [], [f], SearchBudget(max_worlds=2)), Exhausted)


def test_fskd_non_theorem_found():
    c = find_countermodel("FSKd", [], [parse("[]p0 -> p0")], SearchBudget(max_worlds=2))
    assert isinstance(c, Certificate) and verify_certificate(c)


def test_wrong_language_rejected():
    with pytest.raises(IllFormed):
        find_countermodel("N4", [], [parse("p0 []-> p0")])
    with pytest.raises(IllFormed):
        find_countermodel("FSKd", [], [parse("p0 []-> p0")])


def test_random_mode_is_seeded():
    f = parse("~~(p0 -> p1) <-> ~(p0 /\\ ~p1)")
    b = SearchBudget(max_worlds=2, trials=300, seed=5)
    first, second = find_countermodel("N4", [], [f], b), find_countermodel("N4", [], [f], b)
    assert isinstance(first, Certificate) and verify_certificate(first)
    assert dumps(first.model) == dumps(second.model)


def test_agreement_with_decide():
    rng = random.Random(4)
    budget = SearchBudget(max_worlds=3)
    for _ in range(300):
        f = random_formula(rng, 4, LETTERS)
        found = find_countermodel("N4", [], [f], budget)
        verdict = decide_n4([], f)
        if isinstance(found, Certificate):
            assert isinstance(verdict, Refuted)
        elif isinstance(verdict, Refuted):
            assert verdict.model.size > 3


@pytest.mark.parametrize("logic", ["N4", "N4CK", "FSKd", "IntCK", "IK"])
def test_samples_validate_and_reproduce(logic):
    rng = random.Random(77)
    for _ in range(400):
        assert validate(sample_model(logic, LETTERS, SearchBudget(max_worlds=4), rng)) == []
    a = sample_model(logic, LETTERS, SearchBudget(max_worlds=4, seed=9))
    b = sample_model(logic, LETTERS, SearchBudget(max_worlds=4, seed=9))
    assert dumps(a) == dumps(b)


def test_one_world_samples_include_the_total_model():
    rng = random.Random(0)
    seen = set()
    for _ in range(500):
        m = sample_model("N4CK", [p(0)], SearchBudget(max_worlds=1), rng)
        assert m.size == 1
        seen.add(dumps(m))
    from n4ck.kripke import single_world_total
    assert dumps(single_world_total([p(0)])) in seen


def test_produced_models_have_functional_tables():
    rng = random.Random(12)
    for _ in range(50):
        g = random_formula(rng, 3, LETTERS, ("neg", "and", "imp", "boxto"))
        got = find_countermodel("N4CK", [], [g], SearchBudget(max_worlds=2, trials=50, seed=rng.randrange(99)))
        if isinstance(got, Certificate):
            assert not [v for v in validate(got.model) if v.condition == "duplicate-key"]


def test_enumerate_formulas_counts():
    assert len(enumerate_formulas([p(0)], 2, 99, ("neg", "and"))) == 13
    fs = enumerate_formulas([p(0), p(1)], 1, 3, ("neg",))
    assert set(fs) == {p(0), p(1), Neg(p(0)), Neg(p(1))}
