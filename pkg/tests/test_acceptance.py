"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed with
output capture suspended) or directly with ``python tests/test_acceptance.py``.
"""

import random
import sys
import time

from n4ck.decide import Refuted, Valid, decide_n4
from n4ck.kripke import join_with_root, single_world_total, validate
from n4ck.proofs import CORPUS_ORDER, check_corpus, check_derivation, parse_schema, soundness_sample
from n4ck.search import (CONNECTIVES, Certificate, Exhausted, SearchBudget, enumerate_formulas,
                         find_countermodel, random_formula, sample_model, verify_certificate)
from n4ck.semantics import PLUS, eval_n4ck, holds_pair, is_upset, truth_set
from n4ck.syntax import Box, Lang, Neg, expand, p, parse
from n4ck.translate import (Direction, apply, converse_failure, faithfulness_harness, tr, tr_bar,
                            tr_i, translated_corpus)

LETTERS = [p(0), p(1), p(2)]


def _report(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()
    return ok


# ---------------------------------------------------------------- criteria

def criterion_1():
    start = time.perf_counter()
    library = check_corpus()
    elapsed = time.perf_counter() - start
    wanted = {f"{s}/{n}" for s in ("N4CK", "FSKd") for n in CORPUS_ORDER[s]}
    wanted |= {"CK/A2", "CK/A3", "CK/RCbox2"}
    missing = sorted(k for k in wanted if k not in library)
    ok = not missing and elapsed < 5.0
    return ok, f"{len(wanted)} required scripts checked in {elapsed:.2f}s, missing {missing}"


def criterion_2():
    problems = []
    for system in ("N4CK", "FSKd"):
        report = soundness_sample(system, trials=500, models=200, seed=11)
        problems += [(system, f.name) for f in report.failures]
    fake = {"fake": parse_schema("(phi -> psi) -> (~psi -> ~phi)")}
    control = soundness_sample("N4CK", trials=50, models=200, seed=11, extra_axioms=fake, rule_trials=0)
    caught = control.failures_for("fake")
    ok = not problems and bool(caught) and caught[0].trial < 50
    when = caught[0].trial + 1 if caught else None
    return ok, f"axiom/rule failures {problems}; fake axiom caught at sample {when}"


def criterion_3():
    rng = random.Random(21)
    budget = SearchBudget(max_worlds=4)
    violations = 0
    trials = 10_000
    logics = ("N4", "N4CK", "FSKd")
    models = {lg: [sample_model(lg, LETTERS, budget, rng) for _ in range(200)] for lg in logics}
    for _ in range(trials):
        logic = rng.choice(logics)
        m = rng.choice(models[logic])
        f = random_formula(rng, rng.randint(1, 5), LETTERS, CONNECTIVES[logic])
        ts = truth_set(m, f)
        part = ts.plus if rng.random() < 0.5 else ts.minus
        if not is_upset(m, part):
            violations += 1
    return violations == 0, f"{trials} trials, {violations} violations"


def criterion_4():
    rng = random.Random(34)
    budget = SearchBudget(max_worlds=3)
    bad = 0
    counts = {"valid": 0, "refuted": 0}
    for _ in range(10_000):
        f = random_formula(rng, 4, LETTERS)
        verdict = decide_n4([], f)
        found = find_countermodel("N4", [], [f], budget)
        if isinstance(found, Certificate) and not verify_certificate(found):
            bad += 1
        if isinstance(verdict, Valid):
            counts["valid"] += 1
            bad += not isinstance(found, Exhausted)
        else:
            counts["refuted"] += 1
            sound = validate(verdict.model) == [] and holds_pair(verdict.model, verdict.world, [], [f], "N4")
            consistent = isinstance(found, Certificate) or verdict.model.size > 3
            bad += not (sound and consistent)
    return bad == 0, f"10000 formulas {counts}, {bad} disagreements or bad certificates"


def criterion_5():
    cases = [
        ("N4", [], "(p0 -> p1) -> (~p1 -> ~p0)", 1, True),
        ("N4", [], "~~(p0 -> p1) <-> ~(p0 /\\ ~p1)", 2, False),
        ("N4", [], "p0 \\/ ~p0", 1, True),
        ("N4CK", ["(p1 /\\ ~p2) []-> p3"], "~(p1 -> p2) []-> p3", 3, False),
        ("N4CK", ["~(p1 /\\ ~p2) []-> p3"], "(p1 -> p2) []-> p3", 3, False),
    ]
    notes = []
    ok = True
    for logic, gamma, delta, worlds, exact in cases:
        start = time.perf_counter()
        c = find_countermodel(logic, [parse(g) for g in gamma], [parse(delta)], SearchBudget(max_worlds=worlds))
        elapsed = time.perf_counter() - start
        good = (isinstance(c, Certificate) and verify_certificate(c) and elapsed <= 60
                and (c.model.size == worlds if exact else c.model.size <= worlds))
        ok &= good
        size = c.model.size if isinstance(c, Certificate) else None
        notes.append(f"{size}w/{elapsed:.1f}s")
    return ok, "countermodels " + ", ".join(notes)


def criterion_6():
    notes = []
    ok = True
    for name in ("e", "epm", "emp", "em", "eplus", "eminus"):
        report = faithfulness_harness(name, trials=1000, seed=6)
        ok &= report.ok
        notes.append(f"{name}:{len(report.violations)}")
    for name in ("eplus", "eminus"):
        found = converse_failure(name)
        ok &= found is not None and verify_certificate(found.certificate)
    return ok, f"violations {' '.join(notes)}; both converse witnesses verified" if ok else \
        f"violations {' '.join(notes)}"


def criterion_7():
    mismatches = 0
    formulas = enumerate_formulas([p(0), p(1)], 5, 7, ("neg", "and", "or", "imp", "box"))
    for anchor in (p(1), parse("p0 []-> p1")):
        mismatches += sum(tr_bar(tr(anchor, f)) != f for f in formulas)
    box = Box(p(1))
    diagram = (apply("epm", tr(p(1), box)) == parse("p1 []-> (q1 []-> p1)", Lang.LeBoxtoDiamto)
               and apply("emp", tr(p(1), box)) == parse("q1 []-> (p1 []-> p1)", Lang.LeBoxtoDiamto)
               and tr_i(p(1), apply("em", box)) == parse("p1 []-> p1"))
    rng = random.Random(77)
    anchors = [p(1), parse("p0 []-> p1"), parse("~p2 /\\ p0")]
    commute_bad = 0
    for _ in range(1000):
        f = expand(random_formula(rng, 4, LETTERS, CONNECTIVES["FSKd"]))
        a = rng.choice(anchors)
        commute_bad += apply("eplus", tr(a, f)) != tr_i(apply("eplus", a), apply("em", f))
        commute_bad += apply("eminus", tr(a, f)) != tr_i(apply("eminus", Neg(a)), apply("em", f))
    ok = mismatches == 0 and diagram and commute_bad == 0
    return ok, (f"round trip on {len(formulas)} formulas x 2 anchors: {mismatches} mismatches; "
                f"diagram values {'match' if diagram else 'differ'}; commutation failures {commute_bad}")


def criterion_8():
    failures = []
    total = 0
    for direction, anchor in ((Direction.FSKD_TO_N4CK, p(0)), (Direction.N4CK_TO_FSKD, None)):
        out, library = translated_corpus(direction, anchor)
        for key, d in out:
            total += 1
            try:
                check_derivation(d, library)
            except Exception as exc:  # report rather than stop at the first
                failures.append((key, type(exc).__name__))
    expected = len(CORPUS_ORDER["FSKd"]) + len(CORPUS_ORDER["N4CK"])
    return not failures and total == expected, f"{total} translated scripts, failures {failures}"


def criterion_9():
    rng = random.Random(9)
    m = single_world_total(LETTERS)
    misses = sum(not eval_n4ck(m, 0, random_formula(rng, rng.randint(1, 5), LETTERS, CONNECTIVES["N4CK"]), PLUS)
                 for _ in range(1000))
    return misses == 0, f"1000 formulas, {misses} not verified"


def criterion_10():
    rng = random.Random(10)
    budget = SearchBudget(max_worlds=3)
    bad = 0
    for _ in range(100):
        m1 = sample_model("N4CK", LETTERS, budget, rng)
        m2 = sample_model("N4CK", LETTERS, budget, rng)
        joined, root = join_with_root(m1, m2)
        bad += validate(joined) != []
        for _ in range(20):
            f = random_formula(rng, 4, LETTERS, CONNECTIVES["N4CK"])
            whole = truth_set(joined, f)
            for part, offset in ((m1, 0), (m2, m1.size)):
                local = truth_set(part, f)
                for w in part.worlds:
                    bad += ((w in local.plus) != (w + offset in whole.plus)
                            or (w in local.minus) != (w + offset in whole.minus))
    return bad == 0, f"100 joined pairs, {bad} mismatches or invalid joins"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def _run(number):
    ok, detail = CRITERIA[number - 1]()
    return _report(number, ok, detail), detail


def test_criterion_1_corpus(capsys):
    with capsys.disabled():
        ok, detail = _run(1)
    assert ok, detail


def test_criterion_2_soundness_sampling(capsys):
    with capsys.disabled():
        ok, detail = _run(2)
    assert ok, detail


def test_criterion_3_hereditariness(capsys):
    with capsys.disabled():
        ok, detail = _run(3)
    assert ok, detail


def test_criterion_4_decision_vs_search(capsys):
    with capsys.disabled():
        ok, detail = _run(4)
    assert ok, detail


def test_criterion_5_non_theorems(capsys):
    with capsys.disabled():
        ok, detail = _run(5)
    assert ok, detail


def test_criterion_6_embedding_equivalences(capsys):
    with capsys.disabled():
        ok, detail = _run(6)
    assert ok, detail


def test_criterion_7_translation_identities(capsys):
    with capsys.disabled():
        ok, detail = _run(7)
    assert ok, detail


def test_criterion_8_proof_translation(capsys):
    with capsys.disabled():
        ok, detail = _run(8)
    assert ok, detail


def test_criterion_9_total_model(capsys):
    with capsys.disabled():
        ok, detail = _run(9)
    assert ok, detail


def test_criterion_10_join(capsys):
    with capsys.disabled():
        ok, detail = _run(10)
    assert ok, detail


if __name__ == "__main__":
    results = [_run(n)[0] for n in range(1, 11)]
    sys.exit(0 if all(results) else 1)
