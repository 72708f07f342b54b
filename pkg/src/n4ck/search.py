"""Bounded countermodel search and random model sampling over finite frames.

Frames are enumerated up to isomorphism, smallest first; valuations range
over pairs of upsets.  For conditional models the relation table is guessed
one antecedent at a time, in the order given by ``syntax.antecedents``: the
bi-truth-set of an antecedent only depends on relations already chosen for
smaller conditionals, so its key is known when its relation is chosen, and a
key that already has a relation is reused.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import permutations, product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .kripke import (BiSet, CondIntModel, CondNelsonModel, IntTable, ModalModel, NelsonModel,
                     Table, members, relation_ok, rt_closure, upsets, upward_closure, validate)
from .semantics import IllFormed, holds_pair, two_signed_masks
from .syntax import (MODAL, And, Atom, Box, BoxTo, DiamTo, Diamond, Formula, Imp, Meta, Neg,
                     Or, antecedents, atoms, subformulas, to_text)

LOGICS = ("N4", "N4CK", "FSKd")


@dataclass(frozen=True)
class SearchBudget:
    max_worlds: int = 3
    max_formula_atoms: int = 6
    relation_candidate_cap: int = 4096
    seed: int = 0
    trials: int | None = None       # None means exhaustive

    def __post_init__(self):
        if self.max_worlds < 1:
            raise ValueError("max_worlds must be at least 1")

    @property
    def exhaustive(self) -> bool:
        return self.trials is None


@dataclass(frozen=True)
class Certificate:
    model: NelsonModel | CondNelsonModel | ModalModel
    world: int
    gamma: tuple[Formula, ...]
    delta: tuple[Formula, ...]
    logic: str


@dataclass(frozen=True)
class Exhausted:
    """No countermodel within the budget.  Not a validity claim."""

    logic: str
    budget: SearchBudget

    def __str__(self) -> str:
        how = "exhaustive" if self.budget.exhaustive else f"{self.budget.trials} random trials"
        return f"no {self.logic} countermodel with at most {self.budget.max_worlds} worlds ({how})"


def canonical_logic(name: str) -> str:
    for logic in LOGICS:
        if logic.lower() == name.lower():
            return logic
    raise ValueError(f"unknown logic {name!r}; expected one of {', '.join(LOGICS)}")


# ---------------------------------------------------------------- frames

def _up_masks(n: int, pairs: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    ups = [1 << w for w in range(n)]
    for a, b in pairs:
        ups[a] |= 1 << b
    return tuple(ups)


@lru_cache(maxsize=None)
def preorders(n: int) -> tuple[tuple[int, ...], ...]:
    """One representative per isomorphism class of preorders on ``n`` worlds, as up-masks."""
    off_diagonal = [(a, b) for a in range(n) for b in range(n) if a != b]
    perms = list(permutations(range(n)))
    reps = set()
    for bits in range(1 << len(off_diagonal)):
        rel = {off_diagonal[i] for i in range(len(off_diagonal)) if bits >> i & 1}
        if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2 and a != c):
            continue
        reps.add(min(tuple(sorted((pi[a], pi[b]) for a, b in rel)) for pi in perms))
    return tuple(_up_masks(n, rep) for rep in sorted(reps, key=lambda r: (len(r), r)))


@lru_cache(maxsize=None)
def rooted_preorders(n: int) -> tuple[tuple[int, ...], ...]:
    full = (1 << n) - 1
    return tuple(up for up in preorders(n) if any(u == full for u in up))


def _frame_pairs(up: Sequence[int]) -> set[tuple[int, int]]:
    return {(w, v) for w, u in enumerate(up) for v in members(u)}


@lru_cache(maxsize=None)
def candidate_relations(n: int, up: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Every relation on the frame satisfying (c1) and (c2), as successor masks.

    Ordered by number of pairs, then lexicographically; the empty relation
    comes first.
    """
    out = []
    for bits in range(1 << (n * n)):
        succ = tuple((bits >> (w * n)) & ((1 << n) - 1) for w in range(n))
        if relation_ok(n, up, succ):
            out.append(succ)
    out.sort(key=lambda s: (sum(bin(x).count("1") for x in s), s))
    return tuple(out)


def _upset_list(n: int, up: tuple[int, ...]) -> list[int]:
    return sorted(upsets(n, up), key=lambda m: (bin(m).count("1"), m))


# ---------------------------------------------------------------- scratch models

class _CondScratch:
    """Just enough of a conditional Nelsonian model for the bitmask evaluator."""

    def __init__(self, n, up, plus, minus, table):
        self.size, self.up, self.full = n, up, (1 << n) - 1
        self.plus_masks, self.minus_masks, self.table = plus, minus, table
        self._empty = (0,) * n

    def successors(self, pm: int, mm: int) -> tuple[int, ...]:
        return self.table.get((pm, mm), self._empty)


class _ModalScratch:
    def __init__(self, n, up, plus, minus, succ):
        self.size, self.up, self.full = n, up, (1 << n) - 1
        self.plus_masks, self.minus_masks, self.succ = plus, minus, succ


def _pair_mask(m, gamma, delta) -> int:
    memo: dict = {}
    out = m.full
    for g in gamma:
        out &= two_signed_masks(m, g, memo)[0]
    for d in delta:
        out &= ~two_signed_masks(m, d, memo)[0]
    return out & m.full


def _first_world(mask_: int) -> int:
    return (mask_ & -mask_).bit_length() - 1


def _rel_pairs(succ: Sequence[int]) -> set[tuple[int, int]]:
    return {(w, v) for w, s in enumerate(succ) for v in members(s)}


def _val_dict(masks: dict[Atom, int]) -> dict[Atom, set[int]]:
    return {a: set(members(m)) for a, m in masks.items() if m}


def _cond_model(n, up, plus, minus, table) -> CondNelsonModel:
    rels = {BiSet(members(pm), members(mm)): _rel_pairs(succ)
            for (pm, mm), succ in table.items()}
    return CondNelsonModel.build(n, _frame_pairs(up), _val_dict(plus), _val_dict(minus),
                                 relations=rels)


# ---------------------------------------------------------------- N4

def _np_masks(f: Formula, env: dict, up: Sequence[int], full: int, memo: dict, count: int):
    hit = memo.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Atom):
        res = env.get(f)
        if res is None:
            zero = np.zeros(count, dtype=np.int64)
            res = (zero, zero)
    elif isinstance(f, Neg):
        pl, mi = _np_masks(f.sub, env, up, full, memo, count)
        res = (mi, pl)
    elif isinstance(f, (And, Or, Imp)):
        p1, m1 = _np_masks(f.left, env, up, full, memo, count)
        p2, m2 = _np_masks(f.right, env, up, full, memo, count)
        if isinstance(f, And):
            res = (p1 & p2, m1 | m2)
        elif isinstance(f, Or):
            res = (p1 | p2, m1 & m2)
        else:
            bad = p1 & ~p2 & full
            plus = np.zeros(count, dtype=np.int64)
            for w, u in enumerate(up):
                plus |= ((bad & u) == 0).astype(np.int64) << w
            res = (plus, p1 & m2)
    else:
        raise IllFormed(f"not an N4 formula: {to_text(f)}")
    memo[f] = res
    return res


def _n4_search(gamma, delta, letters, budget) -> Certificate | None:
    # a countermodel at w restricts to the worlds above w, so rooted frames suffice
    vec = letters[-3:]
    outer = letters[:-3]
    for n in range(1, budget.max_worlds + 1):
        for up in rooted_preorders(n):
            full = (1 << n) - 1
            root = next(w for w, u in enumerate(up) if u == full)
            ups = np.array(_upset_list(n, up), dtype=np.int64)
            k = len(ups)
            grids = np.meshgrid(*([np.arange(k)] * (2 * len(vec))), indexing="ij") if vec else []
            count = k ** (2 * len(vec)) if vec else 1
            base = {a: (ups[grids[2 * i]].ravel(), ups[grids[2 * i + 1]].ravel())
                    for i, a in enumerate(vec)}
            for choice in product(range(k), repeat=2 * len(outer)):
                env = dict(base)
                for i, a in enumerate(outer):
                    env[a] = (np.full(count, ups[choice[2 * i]], dtype=np.int64),
                              np.full(count, ups[choice[2 * i + 1]], dtype=np.int64))
                memo: dict = {}
                ok = np.ones(count, dtype=bool)
                for g in gamma:
                    ok &= (_np_masks(g, env, up, full, memo, count)[0] >> root & 1).astype(bool)
                for d in delta:
                    ok &= ~(_np_masks(d, env, up, full, memo, count)[0] >> root & 1).astype(bool)
                hits = np.flatnonzero(ok)
                if hits.size:
                    i = int(hits[0])
                    plus = {a: int(env[a][0][i]) for a in letters}
                    minus = {a: int(env[a][1][i]) for a in letters}
                    model = NelsonModel.build(n, _frame_pairs(up), _val_dict(plus), _val_dict(minus))
                    return Certificate(model, root, tuple(gamma), tuple(delta), "N4")
    return None


def _n4_random(gamma, delta, letters, budget, rng) -> Certificate | None:
    for _ in range(budget.trials):
        n = rng.randint(1, budget.max_worlds)
        up = rng.choice(preorders(n))
        ups = _upset_list(n, up)
        plus = {a: rng.choice(ups) for a in letters}
        minus = {a: rng.choice(ups) for a in letters}
        m = _CondScratch(n, up, plus, minus, {})
        hit = _pair_mask(m, gamma, delta)
        if hit:
            model = NelsonModel.build(n, _frame_pairs(up), _val_dict(plus), _val_dict(minus))
            return Certificate(model, _first_world(hit), tuple(gamma), tuple(delta), "N4")
    return None


# ---------------------------------------------------------------- N4CK

def _valuations(letters, ups) -> Iterator[tuple[dict, dict]]:
    for choice in product(ups, repeat=2 * len(letters)):
        yield ({a: choice[2 * i] for i, a in enumerate(letters)},
               {a: choice[2 * i + 1] for i, a in enumerate(letters)})


def _assign(n, up, plus, minus, ants, cands, gamma, delta, pick):
    """Depth-first relation guessing; ``pick(i, key)`` yields candidates for antecedent i."""
    table: dict[tuple[int, int], tuple[int, ...]] = {}
    scratch = _CondScratch(n, up, plus, minus, table)

    def go(i: int):
        if i == len(ants):
            hit = _pair_mask(scratch, gamma, delta)
            return _first_world(hit) if hit else None
        key = two_signed_masks(scratch, ants[i])
        if key in table:
            return go(i + 1)
        for succ in pick(i, key):
            table[key] = succ
            w = go(i + 1)
            if w is not None:
                return w
        del table[key]
        return None

    w = go(0)
    return None if w is None else (w, dict(table))


def _n4ck_search(gamma, delta, letters, budget, rng) -> Certificate | None:
    ants = antecedents(reduce(And, list(gamma) + list(delta)))
    if budget.exhaustive:
        for n in range(1, budget.max_worlds + 1):
            for up in preorders(n):
                cands = candidate_relations(n, up)[: budget.relation_candidate_cap]
                ups = _upset_list(n, up)
                for plus, minus in _valuations(letters, ups):
                    found = _assign(n, up, plus, minus, ants, cands, gamma, delta,
                                    lambda i, key: cands)
                    if found:
                        w, table = found
                        return Certificate(_cond_model(n, up, plus, minus, table), w,
                                           tuple(gamma), tuple(delta), "N4CK")
        return None
    for _ in range(budget.trials):
        n = rng.randint(1, budget.max_worlds)
        up = rng.choice(preorders(n))
        cands = candidate_relations(n, up)[: budget.relation_candidate_cap]
        ups = _upset_list(n, up)
        plus = {a: rng.choice(ups) for a in letters}
        minus = {a: rng.choice(ups) for a in letters}
        found = _assign(n, up, plus, minus, ants, cands, gamma, delta,
                        lambda i, key: [rng.choice(cands)])
        if found:
            w, table = found
            return Certificate(_cond_model(n, up, plus, minus, table), w,
                               tuple(gamma), tuple(delta), "N4CK")
    return None


# ---------------------------------------------------------------- FSKd

def _fskd_search(gamma, delta, letters, budget, rng) -> Certificate | None:
    def attempt(n, up, plus, minus, succ):
        hit = _pair_mask(_ModalScratch(n, up, plus, minus, succ), gamma, delta)
        if not hit:
            return None
        model = ModalModel.build(n, _frame_pairs(up), _val_dict(plus), _val_dict(minus),
                                 r=_rel_pairs(succ))
        return Certificate(model, _first_world(hit), tuple(gamma), tuple(delta), "FSKd")

    if budget.exhaustive:
        for n in range(1, budget.max_worlds + 1):
            for up in preorders(n):
                cands = candidate_relations(n, up)[: budget.relation_candidate_cap]
                for plus, minus in _valuations(letters, _upset_list(n, up)):
                    for succ in cands:
                        cert = attempt(n, up, plus, minus, succ)
                        if cert:
                            return cert
        return None
    for _ in range(budget.trials):
        n = rng.randint(1, budget.max_worlds)
        up = rng.choice(preorders(n))
        ups = _upset_list(n, up)
        cert = attempt(n, up, {a: rng.choice(ups) for a in letters},
                       {a: rng.choice(ups) for a in letters},
                       rng.choice(candidate_relations(n, up)))
        if cert:
            return cert
    return None


# ---------------------------------------------------------------- entry points

_ALLOWED = {
    "N4": (),
    "N4CK": (BoxTo, DiamTo),
    "FSKd": (Box, Diamond),
}


def _check_formulas(logic: str, fs: Sequence[Formula]) -> None:
    allowed = _ALLOWED[logic]
    for f in fs:
        for g in subformulas(f):
            if isinstance(g, Meta) or (isinstance(g, MODAL) and not isinstance(g, allowed)):
                raise IllFormed(f"{to_text(g)} is not in the language of {logic}")


def find_countermodel(logic: str, gamma: Iterable[Formula], delta: Iterable[Formula],
                      budget: SearchBudget | None = None) -> Certificate | Exhausted:
    """A model and world where all of ``gamma`` hold and none of ``delta`` do."""
    logic = canonical_logic(logic)
    budget = budget or SearchBudget()
    gamma, delta = list(gamma), list(delta)
    _check_formulas(logic, gamma + delta)
    letters = sorted(set().union(set(), *(atoms(f) for f in gamma + delta)),
                     key=lambda a: (a.primed, a.index))
    if len(letters) > budget.max_formula_atoms:
        raise IllFormed(f"{len(letters)} atoms exceed the budget of {budget.max_formula_atoms}")
    rng = random.Random(budget.seed)
    if logic == "N4":
        cert = (_n4_search(gamma, delta, letters, budget) if budget.exhaustive
                else _n4_random(gamma, delta, letters, budget, rng))
    elif logic == "N4CK":
        cert = _n4ck_search(gamma, delta, letters, budget, rng)
    else:
        cert = _fskd_search(gamma, delta, letters, budget, rng)
    if cert is None:
        return Exhausted(logic, budget)
    if not verify_certificate(cert, logic):
        raise AssertionError("search produced a certificate that does not re-check")
    return cert


def verify_certificate(c: Certificate, logic: str | None = None) -> bool:
    logic = canonical_logic(logic or c.logic)
    if validate(c.model):
        return False
    return holds_pair(c.model, c.world, c.gamma, c.delta, logic)


# ---------------------------------------------------------------- sampling

def random_preorder(rng: random.Random, n: int, density: float = 0.3) -> frozenset[tuple[int, int]]:
    edges = [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < density]
    return rt_closure(n, edges)


def _random_upset(rng: random.Random, up: Sequence[int], density: float = 0.35) -> int:
    seeds = sum(1 << w for w in range(len(up)) if rng.random() < density)
    return upward_closure(tuple(up), seeds)


def random_relation(rng: random.Random, n: int, up: Sequence[int], density: float = 0.25) -> tuple[int, ...]:
    """Random pairs, then random witnesses added until (c1) and (c2) hold."""
    succ = [sum(1 << v for v in range(n) if rng.random() < density) for _ in range(n)]
    changed = True
    while changed:
        changed = False
        for w in range(n):
            for v in members(succ[w]):
                for w2 in members(up[w]):
                    if not succ[w2] & up[v]:
                        succ[w2] |= 1 << rng.choice(sorted(members(up[v])))
                        changed = True
                reach = 0
                for w2 in members(up[w]):
                    reach |= succ[w2]
                for v2 in members(up[v] & ~reach):
                    w2 = rng.choice(sorted(members(up[w])))
                    succ[w2] |= 1 << v2
                    reach |= 1 << v2
                    changed = True
    return tuple(succ)


def sample_model(logic: str, atom_set: Iterable[Atom], budget: SearchBudget | None = None,
                 rng: random.Random | None = None, key_density: float = 0.7):
    """A random model of the given kind that passes ``validate``.

    ``logic`` is one of N4, N4CK, FSKd, IntCK, IK.  Relation tables get an
    entry for a random subset of the keys that can arise as truth sets
    (pairs of upsets, or single upsets for IntCK).
    """
    budget = budget or SearchBudget(max_worlds=4)
    rng = rng or random.Random(budget.seed)
    letters = sorted(set(atom_set), key=lambda a: (a.primed, a.index))
    n = rng.randint(1, budget.max_worlds)
    leq = random_preorder(rng, n)
    up = _up_masks(n, leq)
    keys = upsets(n, up)
    plus = {a: _random_upset(rng, up) for a in letters}
    lname = logic if logic in ("IntCK", "IK") else canonical_logic(logic)
    if lname in ("IntCK", "IK"):
        val = _val_dict(plus)
        if lname == "IK":
            return ModalModel.build(n, leq, val, r=_rel_pairs(random_relation(rng, n, up)),
                                    intuitionistic=True)
        rels = {members(k): _rel_pairs(random_relation(rng, n, up))
                for k in keys if rng.random() < key_density}
        model = CondIntModel.build(n, leq, val, relations=rels)
    else:
        minus = {a: _random_upset(rng, up) for a in letters}
        vp, vm = _val_dict(plus), _val_dict(minus)
        if lname == "N4":
            model = NelsonModel.build(n, leq, vp, vm)
        elif lname == "FSKd":
            model = ModalModel.build(n, leq, vp, vm, r=_rel_pairs(random_relation(rng, n, up)))
        else:
            rels = {BiSet(members(kp), members(km)): _rel_pairs(random_relation(rng, n, up))
                    for kp in keys for km in keys if rng.random() < key_density}
            model = CondNelsonModel.build(n, leq, vp, vm, relations=rels)
    problems = validate(model)
    if problems:
        raise AssertionError(f"sampler produced an invalid model: {problems[0]}")
    return model


# ---------------------------------------------------------------- random formulas

CONNECTIVES = {
    "N4": ("neg", "and", "or", "imp"),
    "N4CK": ("neg", "and", "or", "imp", "boxto", "diamto"),
    "FSKd": ("neg", "and", "or", "imp", "box", "diamond"),
    "IntCK": ("and", "or", "imp", "boxto", "diamto"),
    "IK": ("and", "or", "imp", "box", "diamond"),
}

_BUILD = {"neg": Neg, "and": And, "or": Or, "imp": Imp, "boxto": BoxTo, "diamto": DiamTo,
          "box": Box, "diamond": Diamond}


def random_formula(rng: random.Random, depth: int, letters: Sequence[Formula],
                   connectives: Sequence[str] = CONNECTIVES["N4"], leaf_bias: float = 0.2) -> Formula:
    """Random formula of depth at most ``depth`` over ``letters``."""
    if depth <= 0 or rng.random() < leaf_bias:
        return rng.choice(letters)
    op = rng.choice(connectives)
    build = _BUILD[op]
    if op in ("neg", "box", "diamond"):
        return build(random_formula(rng, depth - 1, letters, connectives, leaf_bias))
    return build(random_formula(rng, depth - 1, letters, connectives, leaf_bias),
                 random_formula(rng, depth - 1, letters, connectives, leaf_bias))


def enumerate_formulas(letters: Sequence[Formula], max_depth: int, max_size: int,
                       connectives: Sequence[str] = CONNECTIVES["N4"]) -> list[Formula]:
    """Every formula over ``letters`` with at most ``max_size`` nodes and depth at most ``max_depth``."""
    unary = [_BUILD[c] for c in connectives if c in ("neg", "box", "diamond")]
    binary = [_BUILD[c] for c in connectives if c not in ("neg", "box", "diamond")]
    # (depth bound, size) -> formulas of exactly that size within the depth bound
    table: dict[tuple[int, int], list[Formula]] = {}

    def build(d: int, s: int) -> list[Formula]:
        key = (d, s)
        if key in table:
            return table[key]
        out: list[Formula] = []
        if s == 1:
            out = list(letters)
        elif d > 0:
            for u in unary:
                out.extend(u(x) for x in build(d - 1, s - 1))
            for left in range(1, s - 1):
                lhs, rhs = build(d - 1, left), build(d - 1, s - 1 - left)
                for b in binary:
                    out.extend(b(x, y) for x in lhs for y in rhs)
        table[key] = out
        return out

    return [f for s in range(1, max_size + 1) for f in build(max_depth, s)]
