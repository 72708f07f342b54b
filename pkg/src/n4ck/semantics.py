"""Satisfaction relations and truth sets.

Two families of evaluators live here:

* ``eval_*`` functions follow the inductive clauses world by world; they are
  slow and meant as the readable reference.
* ``truth_set`` / ``truth_mask`` compute whole extensions bottom-up with
  bitmasks and a per-call memo; everything performance sensitive uses them.

The two are cross-checked in the test suite.
"""

from __future__ import annotations

import enum
from typing import Iterable

from .kripke import (BiSet, CondIntModel, CondNelsonModel, ModalModel, NelsonModel,
                     members)
from .syntax import (And, Atom, Box, BoxTo, DiamTo, Diamond, Formula, Imp, Meta, Neg, Or)


class Sign(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"
    INT = "int"

    def flip(self) -> "Sign":
        return {Sign.PLUS: Sign.MINUS, Sign.MINUS: Sign.PLUS}[self]


PLUS, MINUS, INT = Sign.PLUS, Sign.MINUS, Sign.INT


class IllFormed(ValueError):
    pass


class FlavorMismatch(ValueError):
    pass


# ---------------------------------------------------------------- reference evaluators

def _atom(m, a: Atom, w: int, sign: Sign) -> bool:
    if sign is INT:
        val = m.val if isinstance(m, CondIntModel) else m.vplus
    else:
        val = m.vplus if sign is PLUS else m.vminus
    return w in val.get(a, ())


def _above(m, w: int) -> list[int]:
    return sorted(v for v in m.worlds if (w, v) in m.leq)


def eval_n4(m: NelsonModel, w: int, f: Formula, sign: Sign) -> bool:
    """The propositional two-signed clauses only (no conditionals, no modalities)."""
    def sat(w: int, f: Formula, s: Sign) -> bool:
        if isinstance(f, Atom):
            return _atom(m, f, w, s)
        if isinstance(f, Neg):
            return sat(w, f.sub, s.flip())
        if isinstance(f, And):
            if s is PLUS:
                return sat(w, f.left, s) and sat(w, f.right, s)
            return sat(w, f.left, s) or sat(w, f.right, s)
        if isinstance(f, Or):
            if s is PLUS:
                return sat(w, f.left, s) or sat(w, f.right, s)
            return sat(w, f.left, s) and sat(w, f.right, s)
        if isinstance(f, Imp):
            if s is PLUS:
                return all(not sat(v, f.left, PLUS) or sat(v, f.right, PLUS) for v in _above(m, w))
            return sat(w, f.left, PLUS) and sat(w, f.right, MINUS)
        raise IllFormed(f"{type(f).__name__} is not a propositional connective")
    return sat(w, f, sign)


def eval_n4ck(m: CondNelsonModel, w: int, f: Formula, sign: Sign) -> bool:
    """Verification (PLUS) or falsification (MINUS) of ``f`` at ``w``."""
    if sign is INT:
        raise FlavorMismatch("conditional Nelsonian models have two signs")

    def extension(g: Formula) -> BiSet:
        return BiSet(frozenset(v for v in m.worlds if sat(v, g, PLUS)),
                     frozenset(v for v in m.worlds if sat(v, g, MINUS)))

    def sat(w: int, f: Formula, s: Sign) -> bool:
        if isinstance(f, Atom):
            return _atom(m, f, w, s)
        if isinstance(f, Neg):
            return sat(w, f.sub, s.flip())
        if isinstance(f, And):
            if s is PLUS:
                return sat(w, f.left, s) and sat(w, f.right, s)
            return sat(w, f.left, s) or sat(w, f.right, s)
        if isinstance(f, Or):
            if s is PLUS:
                return sat(w, f.left, s) or sat(w, f.right, s)
            return sat(w, f.left, s) and sat(w, f.right, s)
        if isinstance(f, Imp):
            if s is PLUS:
                return all(not sat(v, f.left, PLUS) or sat(v, f.right, PLUS) for v in _above(m, w))
            return sat(w, f.left, PLUS) and sat(w, f.right, MINUS)
        if isinstance(f, BoxTo):
            rel = m.relation(extension(f.antecedent))
            if s is PLUS:
                return all(sat(u, f.consequent, PLUS)
                           for v in _above(m, w) for (v2, u) in rel if v2 == v)
            return any(sat(u, f.consequent, MINUS) for (w2, u) in rel if w2 == w)
        if isinstance(f, DiamTo):
            rel = m.relation(extension(f.antecedent))
            if s is PLUS:
                return any(sat(u, f.consequent, PLUS) for (w2, u) in rel if w2 == w)
            return all(sat(u, f.consequent, MINUS)
                       for v in _above(m, w) for (v2, u) in rel if v2 == v)
        if isinstance(f, Meta):
            raise IllFormed(f"metavariable {f.name} has no truth value")
        raise IllFormed(f"{type(f).__name__} is not interpreted in conditional models")
    return sat(w, f, sign)


def eval_intck(m: CondIntModel, w: int, f: Formula) -> bool:
    """Intuitionistic satisfaction with conditionals keyed by single truth sets."""
    def extension(g: Formula) -> frozenset[int]:
        return frozenset(v for v in m.worlds if sat(v, g))

    def sat(w: int, f: Formula) -> bool:
        if isinstance(f, Atom):
            return _atom(m, f, w, INT)
        if isinstance(f, Neg):
            return not any(sat(v, f.sub) for v in _above(m, w))
        if isinstance(f, And):
            return sat(w, f.left) and sat(w, f.right)
        if isinstance(f, Or):
            return sat(w, f.left) or sat(w, f.right)
        if isinstance(f, Imp):
            return all(not sat(v, f.left) or sat(v, f.right) for v in _above(m, w))
        if isinstance(f, BoxTo):
            rel = m.relation(extension(f.antecedent))
            return all(sat(u, f.consequent) for v in _above(m, w) for (v2, u) in rel if v2 == v)
        if isinstance(f, DiamTo):
            rel = m.relation(extension(f.antecedent))
            return any(sat(u, f.consequent) for (w2, u) in rel if w2 == w)
        if isinstance(f, Meta):
            raise IllFormed(f"metavariable {f.name} has no truth value")
        raise IllFormed(f"{type(f).__name__} is not interpreted in conditional models")
    return sat(w, f)


def eval_modal(m: ModalModel, w: int, f: Formula, sign: Sign) -> bool:
    """Two-signed clauses on Nelsonian modal models, one sign on intuitionistic ones."""
    if m.nelsonian == (sign is INT):
        raise FlavorMismatch(f"sign {sign.value} does not fit a {m.kind} model")
    succ = {w: sorted(u for (v, u) in m.r if v == w) for w in m.worlds}

    def sat(w: int, f: Formula, s: Sign) -> bool:
        if isinstance(f, Atom):
            return _atom(m, f, w, s)
        if isinstance(f, Neg):
            if s is INT:
                return not any(sat(v, f.sub, INT) for v in _above(m, w))
            return sat(w, f.sub, s.flip())
        if isinstance(f, And):
            if s is MINUS:
                return sat(w, f.left, s) or sat(w, f.right, s)
            return sat(w, f.left, s) and sat(w, f.right, s)
        if isinstance(f, Or):
            if s is MINUS:
                return sat(w, f.left, s) and sat(w, f.right, s)
            return sat(w, f.left, s) or sat(w, f.right, s)
        if isinstance(f, Imp):
            if s is MINUS:
                return sat(w, f.left, PLUS) and sat(w, f.right, MINUS)
            return all(not sat(v, f.left, s) or sat(v, f.right, s) for v in _above(m, w))
        if isinstance(f, Box):
            if s is MINUS:
                return any(sat(u, f.sub, MINUS) for u in succ[w])
            return all(sat(u, f.sub, s) for v in _above(m, w) for u in succ[v])
        if isinstance(f, Diamond):
            if s is INT:
                return any(sat(u, f.sub, INT) for u in succ[w])
            # Nelsonian flavor: the abbreviation ~[]~
            return sat(w, Neg(Box(Neg(f.sub))), s)
        if isinstance(f, Meta):
            raise IllFormed(f"metavariable {f.name} has no truth value")
        raise IllFormed(f"{type(f).__name__} is not interpreted in modal models")
    return sat(w, f, sign)


# ---------------------------------------------------------------- bitmask truth sets

def _forall_up(up: tuple[int, ...], bad: int) -> int:
    """Worlds all of whose successors avoid ``bad``."""
    out = 0
    for w, u in enumerate(up):
        if not u & bad:
            out |= 1 << w
    return out


def _some_succ(succ: tuple[int, ...], good: int) -> int:
    out = 0
    for w, s in enumerate(succ):
        if s & good:
            out |= 1 << w
    return out


def _escaping(succ: tuple[int, ...], allowed: int) -> int:
    """Worlds with a successor outside ``allowed``."""
    out = 0
    for w, s in enumerate(succ):
        if s & ~allowed:
            out |= 1 << w
    return out


def two_signed_masks(m, f: Formula, memo: dict | None = None) -> tuple[int, int]:
    """(verified, falsified) masks on Nelsonian, conditional or modal models."""
    if memo is None:
        memo = {}
    up = m.up
    full = m.full

    def go(f: Formula) -> tuple[int, int]:
        hit = memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Atom):
            res = (m.plus_masks.get(f, 0), m.minus_masks.get(f, 0))
        elif isinstance(f, Neg):
            pl, mi = go(f.sub)
            res = (mi, pl)
        elif isinstance(f, And):
            (p1, m1), (p2, m2) = go(f.left), go(f.right)
            res = (p1 & p2, m1 | m2)
        elif isinstance(f, Or):
            (p1, m1), (p2, m2) = go(f.left), go(f.right)
            res = (p1 | p2, m1 & m2)
        elif isinstance(f, Imp):
            (p1, m1), (p2, m2) = go(f.left), go(f.right)
            res = (_forall_up(up, p1 & ~p2 & full), p1 & m2)
        elif isinstance(f, (BoxTo, DiamTo)):
            if not hasattr(m, "successors"):
                raise IllFormed("conditionals need a conditional model")
            ka, kb = go(f.antecedent)
            succ = m.successors(ka, kb)
            pb, mb = go(f.consequent)
            box_plus = _forall_up(up, _escaping(succ, pb))
            box_minus = _some_succ(succ, mb)
            if isinstance(f, BoxTo):
                res = (box_plus, box_minus)
            else:
                res = (_some_succ(succ, pb), _forall_up(up, _escaping(succ, mb)))
        elif isinstance(f, (Box, Diamond)):
            if not hasattr(m, "succ"):
                raise IllFormed("modalities need a modal model")
            succ = m.succ
            pa, ma = go(f.sub)
            if isinstance(f, Box):
                res = (_forall_up(up, _escaping(succ, pa)), _some_succ(succ, ma))
            else:
                res = (_some_succ(succ, pa), _forall_up(up, _escaping(succ, ma)))
        elif isinstance(f, Meta):
            raise IllFormed(f"metavariable {f.name} has no truth value")
        else:
            raise IllFormed(f"unknown node {f!r}")
        memo[f] = res
        return res

    return go(f)


def int_mask(m, f: Formula, memo: dict | None = None) -> int:
    """Intuitionistic extension mask on conditional-intuitionistic or modal models."""
    if memo is None:
        memo = {}
    up = m.up
    full = m.full
    val = m.val_masks if hasattr(m, "val_masks") else m.plus_masks

    def go(f: Formula) -> int:
        hit = memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Atom):
            res = val.get(f, 0)
        elif isinstance(f, Neg):
            res = _forall_up(up, go(f.sub))
        elif isinstance(f, And):
            res = go(f.left) & go(f.right)
        elif isinstance(f, Or):
            res = go(f.left) | go(f.right)
        elif isinstance(f, Imp):
            res = _forall_up(up, go(f.left) & ~go(f.right) & full)
        elif isinstance(f, (BoxTo, DiamTo)):
            if not hasattr(m, "successors"):
                raise IllFormed("conditionals need a conditional model")
            succ = m.successors(go(f.antecedent))
            b = go(f.consequent)
            if isinstance(f, BoxTo):
                res = _forall_up(up, _escaping(succ, b))
            else:
                res = _some_succ(succ, b)
        elif isinstance(f, (Box, Diamond)):
            if not hasattr(m, "succ"):
                raise IllFormed("modalities need a modal model")
            a = go(f.sub)
            res = _forall_up(up, _escaping(m.succ, a)) if isinstance(f, Box) else _some_succ(m.succ, a)
        elif isinstance(f, Meta):
            raise IllFormed(f"metavariable {f.name} has no truth value")
        else:
            raise IllFormed(f"unknown node {f!r}")
        memo[f] = res
        return res

    return go(f)


def truth_set(m, f: Formula) -> BiSet:
    """Bi-truth-set on two-signed models; on intuitionistic models ``minus`` is empty."""
    if isinstance(m, CondIntModel) or (isinstance(m, ModalModel) and not m.nelsonian):
        return BiSet(members(int_mask(m, f)), frozenset())
    pl, mi = two_signed_masks(m, f)
    return BiSet(members(pl), members(mi))


def int_truth_set(m, f: Formula) -> frozenset[int]:
    return members(int_mask(m, f))


# ---------------------------------------------------------------- consequence

NELSONIAN = {"N4", "N4CK", "FSKd"}
INTUITIONISTIC = {"IL", "IntCK", "IK"}


def positive_mask(m, f: Formula, logic: str, memo: dict | None = None) -> int:
    """Worlds where ``f`` holds in the sense the logic's consequence uses."""
    if logic in NELSONIAN:
        return two_signed_masks(m, f, memo)[0]
    if logic in INTUITIONISTIC:
        return int_mask(m, f, memo)
    raise ValueError(f"unknown logic {logic!r}")


def holds_pair(m, w: int, gamma: Iterable[Formula], delta: Iterable[Formula], logic: str) -> bool:
    """Every member of ``gamma`` holds at ``w`` and every member of ``delta`` fails."""
    memo: dict = {}
    bit = 1 << w
    for g in gamma:
        if not positive_mask(m, g, logic, memo) & bit:
            return False
    for d in delta:
        if positive_mask(m, d, logic, memo) & bit:
            return False
    return True


def pair_worlds(m, gamma: Iterable[Formula], delta: Iterable[Formula], logic: str) -> int:
    """Mask of worlds at which the pair (gamma, delta) is satisfied."""
    memo: dict = {}
    out = m.full
    for g in gamma:
        out &= positive_mask(m, g, logic, memo)
    for d in delta:
        out &= ~positive_mask(m, d, logic, memo)
    return out


def is_upset(m, s: frozenset[int]) -> bool:
    return all((w, v) not in m.leq or v in s for w in s for v in m.worlds)
