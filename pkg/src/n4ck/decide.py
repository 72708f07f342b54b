"""Decision procedure for N4 consequence, plus the propositional helpers the
proof checker needs (conditional abstraction, classical and intuitionistic
checks).

The N4 procedure is a signed tableau with four signs: T+/F+ assert/deny
verification, T-/F- assert/deny falsification.  T-signed formulas persist
to later worlds, F-signed ones do not.  Only F+ on an implication creates a
new world.  A world problem is the pair (persistent input, local input); when
a problem repeats on the current path the later occurrence is identified with
the earlier world, which keeps the search finite because persistent sets only
grow along a path.  Open branches are read off as a finite monotone model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .kripke import NelsonModel, rt_closure
from .semantics import IllFormed, holds_pair
from .syntax import (MODAL, And, Atom, Formula, Imp, Meta, Neg, Or, atoms, children,
                     rebuild, subformulas, to_text)

TP, FP, TM, FM = 0, 1, 2, 3
_CLASH = {TP: FP, FP: TP, TM: FM, FM: TM}
SIGN_NAMES = {TP: "T+", FP: "F+", TM: "T-", FM: "F-"}


@dataclass(frozen=True)
class SignedFormula:
    sign: int
    formula: Formula

    def __str__(self) -> str:
        return f"{SIGN_NAMES[self.sign]} {to_text(self.formula)}"


@dataclass(frozen=True)
class Valid:
    valid = True


@dataclass(frozen=True)
class Refuted:
    model: NelsonModel
    world: int
    valid = False


Verdict = Valid | Refuted


# ---------------------------------------------------------------- tableau rules

def _rule(sign: int, f: Formula):
    """('lin', parts) | ('br', alternatives) | None for atoms and world-creating F+ implications."""
    if isinstance(f, Neg):
        flipped = {TP: TM, FP: FM, TM: TP, FM: FP}[sign]
        return "lin", [(flipped, f.sub)]
    if isinstance(f, And):
        a, b = f.left, f.right
        return {TP: ("lin", [(TP, a), (TP, b)]),
                FP: ("br", [[(FP, a)], [(FP, b)]]),
                TM: ("br", [[(TM, a)], [(TM, b)]]),
                FM: ("lin", [(FM, a), (FM, b)])}[sign]
    if isinstance(f, Or):
        a, b = f.left, f.right
        return {TP: ("br", [[(TP, a)], [(TP, b)]]),
                FP: ("lin", [(FP, a), (FP, b)]),
                TM: ("lin", [(TM, a), (TM, b)]),
                FM: ("br", [[(FM, a)], [(FM, b)]])}[sign]
    if isinstance(f, Imp):
        a, b = f.left, f.right
        return {TP: ("br", [[(FP, a)], [(TP, b)]]),
                FP: None,
                TM: ("lin", [(TP, a), (TM, b)]),
                FM: ("br", [[(FP, a)], [(FM, b)]])}[sign]
    if isinstance(f, Atom):
        return None
    raise IllFormed(f"decide handles propositional formulas only, got {to_text(f)}")


def _saturate(seed: Sequence[tuple[int, Formula]]) -> list[frozenset]:
    """All open, locally saturated extensions of ``seed``."""
    out: list[frozenset] = []

    def close(have: set, pending: list, branches: list) -> None:
        while pending:
            sf = pending.pop()
            if sf in have:
                continue
            if (_CLASH[sf[0]], sf[1]) in have:
                return
            have.add(sf)
            r = _rule(*sf)
            if r is None:
                continue
            kind, parts = r
            if kind == "lin":
                pending.extend(parts)
            else:
                branches.append(parts)
        while branches:
            alts = branches.pop()
            if any(all(x in have for x in alt) for alt in alts):
                continue
            for alt in alts:
                close(set(have), list(alt), list(branches))
            return
        out.append(frozenset(have))

    close(set(), list(seed), [])
    return out


class _World:
    __slots__ = ("have", "kids")

    def __init__(self):
        self.have: frozenset = frozenset()
        self.kids: list["_World"] = []


class _Tableau:
    def __init__(self):
        self.closed: set = set()
        self.path: dict = {}
        self._names: dict[Formula, str] = {}

    def order(self, f: Formula) -> str:
        name = self._names.get(f)
        if name is None:
            name = self._names[f] = to_text(f)
        return name

    def solve(self, persistent: frozenset, local: frozenset) -> _World | None:
        key = (persistent, local)
        if key in self.closed:
            return None
        if key in self.path:
            return self.path[key]
        node = _World()
        self.path[key] = node
        try:
            seed = sorted(persistent | local, key=lambda sf: (sf[0], self.order(sf[1])))
            for have in _saturate(seed):
                keep = frozenset(sf for sf in have if sf[0] in (TP, TM))
                todo = sorted(((sf[1].left, sf[1].right) for sf in have
                               if sf[0] == FP and isinstance(sf[1], Imp)),
                              key=lambda ab: (self.order(ab[0]), self.order(ab[1])))
                kids = []
                for a, b in todo:
                    if (TP, a) in have and (FP, b) in have:
                        continue
                    child = self.solve(keep | {(TP, a)}, frozenset({(FP, b)}))
                    if child is None:
                        break
                    kids.append(child)
                else:
                    node.have, node.kids = have, kids
                    return node
            self.closed.add(key)
            return None
        finally:
            del self.path[key]


def _extract(root: _World) -> NelsonModel:
    ids: dict[int, int] = {}
    order: list[_World] = []
    stack = [root]
    while stack:
        node = stack.pop()
        if id(node) in ids:
            continue
        ids[id(node)] = len(order)
        order.append(node)
        stack.extend(reversed(node.kids))
    edges = [(ids[id(n)], ids[id(k)]) for n in order for k in n.kids]
    leq = rt_closure(len(order), edges)
    vplus: dict[Atom, set[int]] = {}
    vminus: dict[Atom, set[int]] = {}
    for i, node in enumerate(order):
        for sign, f in node.have:
            if isinstance(f, Atom) and sign in (TP, TM):
                (vplus if sign == TP else vminus).setdefault(f, set()).add(i)
    # upward closure is a no-op for a sound extraction; applying it keeps the
    # certificate monotone even if that ever failed, and the check below
    # would then catch the discrepancy
    for val in (vplus, vminus):
        for a, ws in val.items():
            ws.update(v for (w, v) in leq if w in ws)
    return NelsonModel.build(len(order), leq, vplus, vminus)


def _require_propositional(fs: Iterable[Formula]) -> None:
    for f in fs:
        for g in subformulas(f):
            if isinstance(g, MODAL) or isinstance(g, Meta):
                raise IllFormed(f"abstract conditionals and metavariables first: {to_text(f)}")


def decide_n4(gamma: Iterable[Formula], phi: Formula) -> Verdict:
    """Valid iff every model verifying all of ``gamma`` at a world verifies ``phi`` there."""
    gamma = list(gamma)
    _require_propositional(gamma + [phi])
    tab = _Tableau()
    root = tab.solve(frozenset((TP, g) for g in gamma), frozenset({(FP, phi)}))
    if root is None:
        return Valid()
    model = _extract(root)
    if not holds_pair(model, 0, gamma, [phi], "N4"):
        raise AssertionError("tableau produced a certificate that does not re-check")
    return Refuted(_shrink(model, gamma, phi), 0)


def _restrict(m: NelsonModel, keep: Sequence[int]) -> NelsonModel:
    """Submodel on ``keep``, renumbered in the given order."""
    number = {w: i for i, w in enumerate(keep)}
    leq = [(number[a], number[b]) for a, b in m.leq if a in number and b in number]

    def val(v):
        return {a: {number[w] for w in ws if w in number} for a, ws in v.items()}
    return NelsonModel.build(len(keep), leq, val(m.vplus), val(m.vminus))


def _shrink(m: NelsonModel, gamma: list[Formula], phi: Formula) -> NelsonModel:
    """Smaller certificate: re-root at the smallest refuting cone, then drop worlds greedily.

    Cones are generated submodels, so truth at their worlds is unchanged.
    Dropping a non-root world is a guess that is kept only when the pair
    still holds at the root.
    """
    def refutes(candidate: NelsonModel) -> bool:
        return holds_pair(candidate, 0, gamma, [phi], "N4")

    best = m
    for w in sorted(m.worlds, key=lambda w: bin(m.up[w]).count("1")):
        cone = [w] + sorted(v for v in m.worlds if v != w and (w, v) in m.leq)
        if len(cone) >= best.size:
            break
        sub = _restrict(m, cone)
        if refutes(sub):
            best = sub
            break
    dropped = True
    while dropped and best.size > 1:
        dropped = False
        for v in range(best.size - 1, 0, -1):
            sub = _restrict(best, [w for w in best.worlds if w != v])
            if refutes(sub):
                best, dropped = sub, True
                break
    return best


# ---------------------------------------------------------------- abstraction

def abstract_conditionals(fs: Sequence[Formula]) -> tuple[list[Formula], dict[Formula, Atom]]:
    """Replace maximal conditional/modal subformulas (and metavariables) by fresh atoms.

    Equal subformulas share an atom across the whole list.  Fresh indices
    start above every index in use and are handed out in order of first
    occurrence.
    """
    used = [a.index for f in fs for a in atoms(f)]
    nxt = max(used, default=-1) + 1
    table: dict[Formula, Atom] = {}

    def go(f: Formula) -> Formula:
        nonlocal nxt
        if isinstance(f, MODAL) or isinstance(f, Meta):
            a = table.get(f)
            if a is None:
                a = table[f] = Atom(nxt)
                nxt += 1
            return a
        kids = children(f)
        if not kids:
            return f
        return rebuild(f, tuple(go(k) for k in kids))

    return [go(f) for f in fs], table


# ---------------------------------------------------------------- other bases

def classical_value(f: Formula, row: dict[Atom, bool]) -> bool:
    if isinstance(f, Atom):
        return row[f]
    if isinstance(f, Neg):
        return not classical_value(f.sub, row)
    if isinstance(f, And):
        return classical_value(f.left, row) and classical_value(f.right, row)
    if isinstance(f, Or):
        return classical_value(f.left, row) or classical_value(f.right, row)
    if isinstance(f, Imp):
        return not classical_value(f.left, row) or classical_value(f.right, row)
    raise IllFormed(f"not a propositional formula: {to_text(f)}")


def decide_cl(gamma: Iterable[Formula], phi: Formula) -> dict[Atom, bool] | None:
    """Truth-table check with ``~`` read classically; returns a falsifying row or None."""
    gamma = list(gamma)
    _require_propositional(gamma + [phi])
    letters = sorted(set().union(*(atoms(f) for f in gamma + [phi])),
                     key=lambda a: (a.primed, a.index))
    for values in product((False, True), repeat=len(letters)):
        row = dict(zip(letters, values))
        if all(classical_value(g, row) for g in gamma) and not classical_value(phi, row):
            return row
    return None


def _negation_to_bottom(f: Formula, bottom: Atom) -> Formula:
    if isinstance(f, Neg):
        return Imp(_negation_to_bottom(f.sub, bottom), bottom)
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(_negation_to_bottom(k, bottom) for k in kids))


def decide_il(gamma: Iterable[Formula], phi: Formula) -> Verdict:
    """Intuitionistic consequence with ``~`` as intuitionistic negation.

    Negation becomes implication into a fresh atom ``b`` and ``b -> x`` is
    assumed for every atom ``x``; the result is a positive problem, where N4
    and positive intuitionistic logic coincide.  A refutation certificate is
    a model of the positive problem, not of the original formulas.
    """
    gamma = list(gamma)
    _require_propositional(gamma + [phi])
    letters = set().union(*(atoms(f) for f in gamma + [phi]))
    bottom = Atom(max((a.index for a in letters), default=-1) + 1)
    explode = [Imp(bottom, a) for a in sorted(letters, key=lambda a: (a.primed, a.index))]
    premises = [_negation_to_bottom(g, bottom) for g in gamma] + explode
    return decide_n4(premises, _negation_to_bottom(phi, bottom))
