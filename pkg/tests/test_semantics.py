import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from n4ck.kripke import (BiSet, CondIntModel, CondNelsonModel, ModalModel, NelsonModel, members,
                         single_world_total)
from n4ck.search import CONNECTIVES, SearchBudget, random_formula, sample_model
from n4ck.semantics import (INT, MINUS, PLUS, FlavorMismatch, IllFormed, eval_intck, eval_modal,
                            eval_n4, eval_n4ck, holds_pair, int_truth_set, is_upset, truth_set)
from n4ck.syntax import (And, Box, BoxTo, DiamTo, Diamond, Imp, Meta, Neg, Or, p, parse, q,
                         strong_imp)

from conftest import COND_FORMULAS, N4_FORMULAS

LETTERS = [p(0), p(1), p(2)]


def sampled(logic, seed, max_worlds=4, letters=LETTERS):
    return sample_model(logic, letters, SearchBudget(max_worlds=max_worlds), random.Random(seed))


def separating_model():
    """One world: p1 both ways, p2 only falsified, p3 nowhere; the ~(p1->p2) key reaches the world."""
    return CondNelsonModel.build(
        1, [(0, 0)], {p(1): {0}}, {p(1): {0}, p(2): {0}},
        relations={BiSet.of({0}, {0}): (), BiSet.of({0}, ()): {(0, 0)}})


# ---------------------------------------------------------------- clause examples

@settings(max_examples=200)
@given(COND_FORMULAS)
def test_total_world_verifies_everything(f):
    m = single_world_total(LETTERS)
    assert eval_n4ck(m, 0, f, PLUS)
    assert eval_n4ck(m, 0, f, MINUS)


def test_empty_table_makes_would_conditionals_true():
    m = CondNelsonModel.build(2, [(0, 1)])
    for w in m.worlds:
        assert eval_n4ck(m, w, parse("p0 []-> p1"), PLUS)
        assert not eval_n4ck(m, w, parse("p0 []-> p1"), MINUS)
        assert not eval_n4ck(m, w, parse("p0 <>-> p1"), PLUS)


def test_contraposition_fails_on_one_world():
    m = NelsonModel.build(1, [(0, 0)], {p(0): {0}, p(1): {0}}, {p(1): {0}})
    f = parse("(p0 -> p1) -> (~p1 -> ~p0)")
    assert not eval_n4(m, 0, f, PLUS)
    cm = CondNelsonModel.build(1, [(0, 0)], m.vplus, m.vminus)
    assert not eval_n4ck(cm, 0, f, PLUS)


def test_implication_falsified_locally():
    # 0 <= 1; p0 verified at 0, p1 falsified only at 0
    m = NelsonModel.build(2, [(0, 1)], {p(0): {0, 1}}, {p(1): {0, 1}})
    assert eval_n4(m, 0, parse("p0 -> p1"), MINUS)
    m2 = NelsonModel.build(2, [(0, 1)], {p(0): {0, 1}}, {p(1): {1}})
    assert not eval_n4(m2, 0, parse("p0 -> p1"), MINUS)
    assert eval_n4(m2, 1, parse("p0 -> p1"), MINUS)


def test_atoms_and_negation_truth_sets():
    m = sampled("N4CK", 11)
    for a in LETTERS:
        ts = truth_set(m, a)
        assert ts == BiSet.of(m.vplus.get(a, ()), m.vminus.get(a, ()))
        assert truth_set(m, Neg(a)) == BiSet(ts.minus, ts.plus)


def test_might_conditional_is_existential_image():
    for seed in range(40):
        m = sampled("N4CK", seed)
        f = DiamTo(And(p(0), Neg(p(1))), Or(p(2), p(0)))
        key = truth_set(m, f.antecedent)
        good = truth_set(m, f.consequent).plus
        rel = m.relation(key)
        expect = {w for w in m.worlds if any(u in good for (v, u) in rel if v == w)}
        assert truth_set(m, f).plus == expect


def test_intuitionistic_negation():
    m = CondIntModel.build(2, [(0, 1)], {p(0): {1}})
    assert not eval_intck(m, 0, Neg(p(0)))
    assert not eval_intck(m, 1, Neg(p(0)))
    assert eval_intck(m, 0, Neg(p(1)))


def test_intuitionistic_empty_table():
    m = sampled("IntCK", 2)
    empty = CondIntModel.build(m.size, m.leq, m.val)
    for w in empty.worlds:
        assert eval_intck(empty, w, parse("p0 []-> p1"))


def test_companion_of_total_model_verifies_translated_conditional():
    from n4ck.kripke import to_cond_int
    from n4ck.translate import apply
    m = to_cond_int(single_world_total([p(0)]))
    assert eval_intck(m, 0, apply("epm", parse("p0 []-> p0")))
    assert eval_n4ck(single_world_total([p(0)]), 0, parse("p0 []-> p0"), PLUS)


def test_modal_box_clauses():
    m = ModalModel.build(2, [(0, 0), (1, 1)], {p(0): {1}}, {p(0): {1}}, r={(0, 1)})
    assert eval_modal(m, 0, Box(p(0)), PLUS)
    assert eval_modal(m, 0, Box(p(0)), MINUS)
    assert not eval_modal(m, 1, Box(p(0)), MINUS)
    assert eval_modal(m, 1, Box(p(0)), PLUS)
    noreach = ModalModel.build(1, [(0, 0)], r=())
    assert eval_modal(noreach, 0, Box(p(5)), PLUS)


def test_modal_flavors():
    nel = ModalModel.build(1, [(0, 0)], r=())
    intu = ModalModel.build(1, [(0, 0)], r=(), intuitionistic=True)
    with pytest.raises(FlavorMismatch):
        eval_modal(nel, 0, p(0), INT)
    with pytest.raises(FlavorMismatch):
        eval_modal(intu, 0, p(0), PLUS)
    # intuitionistic diamond is primitive and existential
    m = ModalModel.build(2, [(0, 0), (1, 1)], {p(0): {1}}, r={(0, 1)}, intuitionistic=True)
    assert eval_modal(m, 0, Diamond(p(0)), INT)
    assert not eval_modal(m, 1, Diamond(p(0)), INT)


def test_metavariables_have_no_value():
    m = single_world_total([p(0)])
    with pytest.raises(IllFormed):
        eval_n4ck(m, 0, Meta("phi"), PLUS)
    with pytest.raises(IllFormed):
        truth_set(m, Imp(p(0), Meta("phi")))
    with pytest.raises(IllFormed):
        eval_n4ck(m, 0, Box(p(0)), PLUS)


# ---------------------------------------------------------------- pointed pairs

def test_holds_pair_trivia():
    m = sampled("N4CK", 3)
    for w in m.worlds:
        assert holds_pair(m, w, [], [], "N4CK")
        assert not holds_pair(m, w, [p(0)], [p(0)], "N4CK")


def test_separating_model_separates_the_pair():
    m = separating_model()
    gamma = [parse("(p1 /\\ ~p2) []-> p3")]
    delta = [parse("~(p1 -> p2) []-> p3")]
    assert holds_pair(m, 0, gamma, delta, "N4CK")
    assert not holds_pair(m, 0, delta, gamma, "N4CK")


# ---------------------------------------------------------------- invariants

def _random_models_and_formulas(logic, count, seed, depth=5):
    rng = random.Random(seed)
    budget = SearchBudget(max_worlds=4)
    conns = CONNECTIVES[logic]
    for _ in range(count):
        m = sample_model(logic, LETTERS, budget, rng)
        yield m, random_formula(rng, depth, LETTERS, conns)


def test_hereditariness_conditional():
    for m, f in _random_models_and_formulas("N4CK", 1500, 21):
        ts = truth_set(m, f)
        assert is_upset(m, ts.plus) and is_upset(m, ts.minus)


def test_hereditariness_intuitionistic_and_modal():
    for m, f in _random_models_and_formulas("IntCK", 500, 22):
        assert is_upset(m, int_truth_set(m, f))
    for m, f in _random_models_and_formulas("IK", 500, 23):
        assert is_upset(m, int_truth_set(m, f))
    for m, f in _random_models_and_formulas("FSKd", 500, 24):
        ts = truth_set(m, f)
        assert is_upset(m, ts.plus) and is_upset(m, ts.minus)


def test_bitmask_agrees_with_reference():
    for m, f in _random_models_and_formulas("N4CK", 300, 25, depth=4):
        ts = truth_set(m, f)
        for w in m.worlds:
            assert (w in ts.plus) == eval_n4ck(m, w, f, PLUS)
            assert (w in ts.minus) == eval_n4ck(m, w, f, MINUS)
    for m, f in _random_models_and_formulas("IntCK", 300, 26, depth=4):
        ts = int_truth_set(m, f)
        assert all((w in ts) == eval_intck(m, w, f) for w in m.worlds)
    for logic, sign in (("FSKd", PLUS), ("FSKd", MINUS), ("IK", INT)):
        for m, f in _random_models_and_formulas(logic, 200, 27, depth=4):
            ts = truth_set(m, f)
            got = ts.minus if sign is MINUS else ts.plus
            assert all((w in got) == eval_modal(m, w, f, sign) for w in m.worlds)


def test_might_abbreviation_coherence():
    for m, f in _random_models_and_formulas("N4CK", 300, 28, depth=3):
        b = And(f, p(1))
        g, h = DiamTo(f, b), Neg(BoxTo(f, Neg(b)))
        for w in m.worlds:
            for s in (PLUS, MINUS):
                assert eval_n4ck(m, w, g, s) == eval_n4ck(m, w, h, s)


def test_modal_diamond_coherence():
    for m, f in _random_models_and_formulas("FSKd", 300, 29, depth=4):
        assert truth_set(m, Diamond(f)) == truth_set(m, Neg(Box(Neg(f))))


def test_strong_implication_conditions():
    for m, f in _random_models_and_formulas("N4CK", 400, 30, depth=3):
        g = Or(f, p(2))
        si = strong_imp(f, g)
        for w in m.worlds:
            above = [v for v in m.worlds if (w, v) in m.leq]
            verified = all((not eval_n4ck(m, v, f, PLUS) or eval_n4ck(m, v, g, PLUS))
                           and (not eval_n4ck(m, v, g, MINUS) or eval_n4ck(m, v, f, MINUS))
                           for v in above)
            falsified = eval_n4ck(m, w, f, PLUS) and eval_n4ck(m, w, g, MINUS)
            assert eval_n4ck(m, w, si, PLUS) == verified
            assert eval_n4ck(m, w, si, MINUS) == falsified


@settings(max_examples=300, deadline=None)
@given(N4_FORMULAS, st.integers(0, 10_000))
def test_conservativity_over_n4(f, seed):
    m = sampled("N4CK", seed)
    base = NelsonModel.build(m.size, m.leq, m.vplus, m.vminus)
    for w in m.worlds:
        for s in (PLUS, MINUS):
            assert eval_n4ck(m, w, f, s) == eval_n4(base, w, f, s)


@settings(max_examples=300, deadline=None)
@given(COND_FORMULAS, st.integers(0, 10_000))
def test_double_negation(f, seed):
    m = sampled("N4CK", seed)
    assert truth_set(m, Neg(Neg(f))) == truth_set(m, f)


def test_primed_atoms_read_from_intuitionistic_valuation():
    m = CondIntModel.build(1, [(0, 0)], {q(0): {0}})
    assert eval_intck(m, 0, q(0)) and not eval_intck(m, 0, p(0))
    assert members(0b101) == {0, 2}
