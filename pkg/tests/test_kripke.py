import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from n4ck.kripke import (BiSet, CondIntModel, CondNelsonModel, InvalidInput, ModalModel, NelsonModel,
                         dumps, int_to_nel, join_with_root, loads, model_from_dict, model_to_dict,
                         nel_to_int, relabel_modal, require_valid, rt_closure, single_world_total,
                         to_cond_int, to_cond_nelson, upsets, validate)
from n4ck.search import SearchBudget, sample_model
from n4ck.syntax import Atom, p, q

LETTERS = [p(0), p(1), p(2)]


def sampled(logic, seed, max_worlds=4, letters=LETTERS):
    return sample_model(logic, letters, SearchBudget(max_worlds=max_worlds), random.Random(seed))


def test_single_reflexive_world_is_valid():
    assert validate(CondNelsonModel.build(1, [(0, 0)])) == []


def test_preorder_conditions_reported():
    m = NelsonModel.build(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)])
    kinds = {v.condition for v in validate(m)}
    assert kinds == {"transitive"}
    # build closes under reflexivity; the raw constructor does not
    m = NelsonModel(2, frozenset({(0, 0)}))
    assert [(v.condition, v.witness) for v in validate(m)] == [("reflexive", (1,))]


def test_monotone_valuation_required():
    m = NelsonModel.build(2, [(0, 0), (1, 1), (0, 1)], {p(0): {0}}, {})
    (v,) = validate(m)
    assert v.condition == "mon" and v.witness == ("p0", 0, 1)


def test_c2_violation_with_witness():
    # w=0 <= v=1; key ({0},{}) relates 1 to 0; 0 <= 1 needs some w' >= 1 with R(w', 1)
    m = CondNelsonModel.build(2, [(0, 0), (1, 1), (0, 1)],
                              relations={BiSet.of({0}, ()): {(1, 0)}})
    found = validate(m)
    assert [v.condition for v in found] == ["c2"]
    assert found[0].witness == (1, 0, 1)
    with pytest.raises(InvalidInput):
        require_valid(m)


def test_c1_violation():
    # 0 <= 1, R(0, 0) but world 1 has no successor
    m = CondNelsonModel.build(2, [(0, 0), (1, 1), (0, 1)], relations={BiSet.of((), ()): {(0, 0)}})
    conds = [v.condition for v in validate(m)]
    assert "c1" in conds


def test_modal_frame_conditions():
    leq = [(0, 0), (1, 1), (0, 1)]
    assert validate(ModalModel.build(2, leq, r={(0, 1), (1, 1)})) == []
    bad = ModalModel.build(2, leq, r={(0, 0)})
    assert "c1-m" in {v.condition for v in validate(bad)}


def test_empty_tables_are_vacuously_fine():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(1, 4)
        leq = rt_closure(n, [(a, b) for a in range(n) for b in range(n) if rng.random() < 0.3])
        assert validate(CondNelsonModel.build(n, leq)) == []
        assert validate(CondIntModel.build(n, leq)) == []


def test_duplicate_keys_rejected():
    m = model_from_dict({"type": "cnel", "worlds": 1, "leq": [[0, 0]], "relations": [
        {"plusKey": [0], "minusKey": [], "pairs": [[0, 0]]},
        {"plusKey": [0], "minusKey": [], "pairs": []}]})
    assert "duplicate-key" in {v.condition for v in validate(m)}


@pytest.mark.parametrize("letters", [[p(0)], [], [p(0), p(5)]])
def test_single_world_total(letters):
    m = single_world_total(letters)
    assert validate(m) == []
    assert m.size == 1 and m.leq == frozenset({(0, 0)})
    assert m.entries() == ((BiSet.of({0}, {0}), frozenset({(0, 0)})),)
    for a in letters:
        assert m.vplus[a] == {0} and m.vminus[a] == {0}


def test_join_of_two_total_models():
    joined, root = join_with_root(single_world_total([p(0)]), single_world_total([p(0)]))
    assert joined.size == 3 and root == 2
    assert validate(joined) == []
    assert {(root, v) for v in range(3)} <= joined.leq


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_join_always_validates(s1, s2):
    m1, m2 = sampled("N4CK", s1, 3), sampled("N4CK", s2, 3)
    joined, root = join_with_root(m1, m2)
    assert validate(joined) == []
    assert root == m1.size + m2.size
    for a in LETTERS:
        assert root not in joined.vplus.get(a, ()) and root not in joined.vminus.get(a, ())


def test_to_cond_int_on_one_triple():
    m = to_cond_int(single_world_total([p(0)]))
    assert m.size == 2 and validate(m) == []
    assert m.val[p(0)] == {0} and m.val[q(0)] == {0}


def test_to_cond_int_empty_table():
    src = NelsonModel.build(2, [(0, 0), (1, 1), (0, 1)], {p(0): {1}}, {p(0): {0, 1}})
    cond = CondNelsonModel.build(src.size, src.leq, src.vplus, src.vminus)
    m = to_cond_int(cond)
    assert m.size == 2 and all(t.entries == () for t in m.tables)
    assert m.val == {p(0): {1}, q(0): {0, 1}}


def test_to_cond_nelson_composes():
    m = CondIntModel.build(3, [(0, 0), (1, 1), (2, 2)],
                           relations={frozenset({0}): {(0, 1)}, frozenset({1}): {(1, 2)}})
    n = to_cond_nelson(m)
    assert validate(n) == []
    assert n.relation(BiSet.of({0}, {1})) == {(0, 2)}
    assert n.relation(BiSet.of({1}, {0})) == frozenset()
    assert to_cond_nelson(m, "mp").relation(BiSet.of({1}, {0})) == {(0, 2)}
    assert to_cond_nelson(CondIntModel.build(1, [(0, 0)])).entries() == ()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["pm", "mp"]))
def test_transformations_validate(seed, scheme):
    assert validate(to_cond_int(sampled("N4CK", seed, 3), scheme)) == []
    assert validate(to_cond_nelson(sampled("IntCK", seed, 3, LETTERS + [q(0)]), scheme)) == []


def test_transformations_need_valid_input():
    bad = CondNelsonModel.build(2, [(0, 0), (1, 1), (0, 1)], relations={BiSet.of({0}, ()): {(1, 0)}})
    with pytest.raises(InvalidInput):
        to_cond_int(bad)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_relabel_is_an_involution(seed):
    m = sampled("FSKd", seed)
    there = relabel_modal(m, "nelsonToInt")
    back = relabel_modal(there, "intToNelson")
    assert back == m
    assert there.leq == m.leq and there.r == m.r
    assert not there.nelsonian
    with pytest.raises(InvalidInput):
        relabel_modal(there, "nelsonToInt")


def test_propositional_relabel_round_trip():
    m = sampled("N4", 5)
    assert int_to_nel(nel_to_int(m)) == m


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["N4", "N4CK", "FSKd", "IntCK", "IK"]), st.integers(0, 10_000))
def test_json_round_trip(logic, seed):
    m = sampled(logic, seed, 3)
    text = dumps(m)
    again = loads(text)
    assert dumps(again) == text
    assert model_to_dict(again) == model_to_dict(m)


def test_json_canonical_layout():
    obj = model_to_dict(single_world_total([p(0)]))
    assert obj == {"type": "cnel", "worlds": 1, "leq": [[0, 0]], "vplus": {"p0": [0]},
                   "vminus": {"p0": [0]},
                   "relations": [{"plusKey": [0], "minusKey": [0], "pairs": [[0, 0]]}]}


@pytest.mark.parametrize("text", ['{"type": "zzz", "worlds": 1}', '{"worlds": 1}', "not json"])
def test_bad_model_files(text):
    with pytest.raises(InvalidInput):
        loads(text)


def test_upsets_of_a_chain():
    leq = rt_closure(3, [(0, 1), (1, 2)])
    m = NelsonModel.build(3, leq)
    assert sorted(upsets(3, m.up)) == [0, 0b100, 0b110, 0b111]


def test_primed_atoms_in_nelsonian_valuation_rejected_by_relabel():
    m = NelsonModel.build(1, [(0, 0)], {Atom(0, True): {0}}, {})
    with pytest.raises(InvalidInput):
        nel_to_int(m)
