"""Finite Kripke structures, frame-condition validation and model constructions.

Worlds are the integers ``0..size-1``.  The preorder is stored as a set of
pairs and mirrored into per-world bitmasks (``up[w]`` has bit ``v`` set iff
``w <= v``) which the evaluators use.

Conditional accessibility is a finite table from keys to relations; keys that
are not listed denote the empty relation.  A model can carry several tables.
Each table has key domains: a lookup with key ``(X, Y)`` consults the table at
``(X & plus_domain, Y & minus_domain)``, and the relation for a key is the
union of the hits over all tables.  A plain model has one table whose domains
are the whole carrier.  Joined models and the conditional-intuitionistic
model built from a Nelsonian one use narrower domains, so keys that agree
on a stratum share a relation without every key being listed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping

from .syntax import Atom

Pair = tuple[int, int]
Rel = frozenset[Pair]


class InvalidInput(ValueError):
    pass


@dataclass(frozen=True)
class BiSet:
    plus: frozenset[int]
    minus: frozenset[int]

    @classmethod
    def of(cls, plus: Iterable[int], minus: Iterable[int]) -> "BiSet":
        return cls(frozenset(plus), frozenset(minus))

    def __le__(self, other: "BiSet") -> bool:  # componentwise inclusion
        return self.plus <= other.plus and self.minus <= other.minus

    def __repr__(self) -> str:
        return f"({sorted(self.plus)}, {sorted(self.minus)})"


@dataclass(frozen=True)
class Violation:
    condition: str
    witness: tuple
    message: str = ""

    def __str__(self) -> str:
        return f"{self.condition} {self.witness}: {self.message}"


def mask(worlds: Iterable[int]) -> int:
    m = 0
    for w in worlds:
        m |= 1 << w
    return m


def members(m: int) -> frozenset[int]:
    out, i = [], 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return frozenset(out)


def _freeze_val(val: Mapping[Atom, Iterable[int]] | None) -> dict[Atom, frozenset[int]]:
    out = {}
    for a, ws in (val or {}).items():
        ws = frozenset(ws)
        if ws:
            out[a] = ws
    return dict(sorted(out.items(), key=lambda kv: (kv[0].primed, kv[0].index)))


def _freeze_rel(pairs: Iterable[Pair]) -> Rel:
    return frozenset((int(a), int(b)) for a, b in pairs)


# ---------------------------------------------------------------- frames

class Frame:
    """Mixin for anything with ``size`` and ``leq``."""

    size: int
    leq: frozenset[Pair]

    @property
    def worlds(self) -> range:
        return range(self.size)

    @cached_property
    def up(self) -> tuple[int, ...]:
        ups = [0] * self.size
        for a, b in self.leq:
            if 0 <= a < self.size and 0 <= b < self.size:
                ups[a] |= 1 << b
        return tuple(ups)

    @cached_property
    def down(self) -> tuple[int, ...]:
        downs = [0] * self.size
        for a, b in self.leq:
            if 0 <= a < self.size and 0 <= b < self.size:
                downs[b] |= 1 << a
        return tuple(downs)

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def frame_violations(self) -> list[Violation]:
        out = []
        if self.size < 1:
            out.append(Violation("nonempty", (), "a model needs at least one world"))
            return out
        for a, b in sorted(self.leq):
            if not (0 <= a < self.size and 0 <= b < self.size):
                out.append(Violation("carrier", (a, b), "preorder pair outside the carrier"))
        for w in self.worlds:
            if (w, w) not in self.leq:
                out.append(Violation("reflexive", (w,), "missing (w, w)"))
        for a, b in sorted(self.leq):
            for b2, c in sorted(self.leq):
                if b2 == b and (a, c) not in self.leq:
                    out.append(Violation("transitive", (a, b, c), "a<=b<=c but not a<=c"))
        return out

    def upset_violations(self, label: str, val: Mapping[Atom, frozenset[int]]) -> list[Violation]:
        out = []
        for a, ws in val.items():
            for w in sorted(ws):
                if not 0 <= w < self.size:
                    out.append(Violation("carrier", (a.name, w), f"{label} world outside the carrier"))
                    continue
                for v in sorted(members(self.up[w])):
                    if v not in ws:
                        out.append(Violation("mon", (a.name, w, v), f"{label}({a.name}) not upward closed"))
        return out

    def relation_violations(self, rel: Rel, tag: str, key=None) -> list[Violation]:
        """Check the two interaction conditions between ``rel`` and ``leq``.

        (c1): w <= w' and R(w, v) imply R(w', v') for some v' >= v.
        (c2): R(w, v) and v <= v' imply R(w', v') for some w' >= w.
        """
        out = []
        succ = [0] * self.size
        for a, b in rel:
            if not (0 <= a < self.size and 0 <= b < self.size):
                out.append(Violation("carrier", (key, a, b), "relation pair outside the carrier"))
                return out
            succ[a] |= 1 << b
        for w, v in sorted(rel):
            for w2 in sorted(members(self.up[w])):
                if not succ[w2] & self.up[v]:
                    out.append(Violation(f"c1{tag}", (w, w2, v),
                                         f"R({w},{v}) and {w}<={w2} but no R({w2},v') with v'>={v}"
                                         + (f" at key {key}" if key is not None else "")))
            for v2 in sorted(members(self.up[v])):
                if not any(succ[w2] >> v2 & 1 for w2 in members(self.up[w])):
                    out.append(Violation(f"c2{tag}", (w, v, v2),
                                         f"R({w},{v}) and {v}<={v2} but no w'>={w} with R(w',{v2})"
                                         + (f" at key {key}" if key is not None else "")))
        return out


def relation_ok(size: int, up: tuple[int, ...], succ: tuple[int, ...]) -> bool:
    """Fast (c1)/(c2) test for a relation given as successor masks."""
    reach_up = []
    for w in range(size):
        acc = 0
        for w2 in range(size):
            if up[w] >> w2 & 1:
                acc |= succ[w2]
        reach_up.append(acc)
    for w in range(size):
        for v in range(size):
            if not succ[w] >> v & 1:
                continue
            for w2 in range(size):
                if up[w] >> w2 & 1 and not succ[w2] & up[v]:
                    return False
            if up[v] & ~reach_up[w]:
                return False
    return True


# ---------------------------------------------------------------- tables

@dataclass(frozen=True)
class Table:
    """Bi-set keyed relations, looked up after intersecting keys with the domains."""

    entries: tuple[tuple[BiSet, Rel], ...]
    plus_domain: frozenset[int] | None = None   # None: the whole carrier
    minus_domain: frozenset[int] | None = None

    @classmethod
    def build(cls, entries: Mapping[BiSet, Iterable[Pair]] | Iterable[tuple[BiSet, Iterable[Pair]]],
              plus_domain=None, minus_domain=None) -> "Table":
        items = entries.items() if isinstance(entries, Mapping) else entries
        frozen = [(k, _freeze_rel(r)) for k, r in items]
        frozen = [(k, r) for k, r in frozen if r]
        frozen.sort(key=lambda kv: (sorted(kv[0].plus), sorted(kv[0].minus)))
        return cls(tuple(frozen),
                   None if plus_domain is None else frozenset(plus_domain),
                   None if minus_domain is None else frozenset(minus_domain))


@dataclass(frozen=True)
class IntTable:
    """Set keyed relations, looked up after intersecting keys with ``domain``."""

    entries: tuple[tuple[frozenset[int], Rel], ...]
    domain: frozenset[int] | None = None

    @classmethod
    def build(cls, entries: Mapping[frozenset[int], Iterable[Pair]] | Iterable, domain=None) -> "IntTable":
        items = entries.items() if isinstance(entries, Mapping) else entries
        frozen = [(frozenset(k), _freeze_rel(r)) for k, r in items]
        frozen = [(k, r) for k, r in frozen if r]
        frozen.sort(key=lambda kv: sorted(kv[0]))
        return cls(tuple(frozen), None if domain is None else frozenset(domain))


def _succ_masks(size: int, rel: Rel) -> tuple[int, ...]:
    succ = [0] * size
    for a, b in rel:
        succ[a] |= 1 << b
    return tuple(succ)


# ---------------------------------------------------------------- models

@dataclass(frozen=True)
class NelsonModel(Frame):
    size: int
    leq: frozenset[Pair]
    vplus: Mapping[Atom, frozenset[int]] = field(default_factory=dict)
    vminus: Mapping[Atom, frozenset[int]] = field(default_factory=dict)

    kind = "nel"

    @classmethod
    def build(cls, size: int, leq: Iterable[Pair] = (), vplus=None, vminus=None, **extra):
        leq = set(_freeze_rel(leq)) | {(w, w) for w in range(size)}
        return cls(size, frozenset(leq), _freeze_val(vplus), _freeze_val(vminus), **extra)

    @cached_property
    def plus_masks(self) -> dict[Atom, int]:
        return {a: mask(ws) for a, ws in self.vplus.items()}

    @cached_property
    def minus_masks(self) -> dict[Atom, int]:
        return {a: mask(ws) for a, ws in self.vminus.items()}

    def violations(self) -> list[Violation]:
        out = self.frame_violations()
        if out:
            return out
        return self.upset_violations("V+", self.vplus) + self.upset_violations("V-", self.vminus)


@dataclass(frozen=True)
class CondNelsonModel(NelsonModel):
    tables: tuple[Table, ...] = ()

    kind = "cnel"

    @classmethod
    def build(cls, size: int, leq: Iterable[Pair] = (), vplus=None, vminus=None,
              relations: Mapping[BiSet, Iterable[Pair]] | None = None,
              tables: Iterable[Table] | None = None):
        if tables is None:
            tables = (Table.build(relations or {}),)
        return super().build(size, leq, vplus, vminus, tables=tuple(tables))

    @cached_property
    def _index(self) -> list[tuple[int, int, dict[tuple[int, int], tuple[int, ...]]]]:
        out = []
        for t in self.tables:
            pd = self.full if t.plus_domain is None else mask(t.plus_domain)
            md = self.full if t.minus_domain is None else mask(t.minus_domain)
            out.append((pd, md, {(mask(k.plus), mask(k.minus)): _succ_masks(self.size, r)
                                 for k, r in t.entries}))
        return out

    @cached_property
    def _lookup_cache(self) -> dict:
        return {}

    def successors(self, plus_mask: int, minus_mask: int) -> tuple[int, ...]:
        """Successor masks of the relation indexed by the bi-set (plus, minus)."""
        key = (plus_mask, minus_mask)
        cached = self._lookup_cache.get(key)
        if cached is not None:
            return cached
        succ = [0] * self.size
        for pd, md, entries in self._index:
            hit = entries.get((plus_mask & pd, minus_mask & md))
            if hit:
                succ = [a | b for a, b in zip(succ, hit)]
        result = tuple(succ)
        self._lookup_cache[key] = result
        return result

    def relation(self, key: BiSet) -> Rel:
        succ = self.successors(mask(key.plus), mask(key.minus))
        return frozenset((w, v) for w in self.worlds for v in members(succ[w]))

    def violations(self) -> list[Violation]:
        out = super().violations()
        if out and any(v.condition in ("nonempty", "carrier", "reflexive", "transitive") for v in out):
            return out
        for t in self.tables:
            seen = set()
            pd = frozenset(self.worlds) if t.plus_domain is None else t.plus_domain
            md = frozenset(self.worlds) if t.minus_domain is None else t.minus_domain
            for key, rel in t.entries:
                norm = (key.plus & pd, key.minus & md)
                if not (key.plus | key.minus) <= frozenset(self.worlds):
                    out.append(Violation("carrier", (key,), "key outside the carrier"))
                if norm in seen:
                    out.append(Violation("duplicate-key", (key,), "two entries share a normalized key"))
                seen.add(norm)
                out.extend(self.relation_violations(rel, "", key))
        return out

    @property
    def is_plain(self) -> bool:
        """One table keyed over the whole carrier."""
        return (len(self.tables) <= 1 and all(t.plus_domain is None and t.minus_domain is None
                                               for t in self.tables))

    def entries(self) -> tuple[tuple[BiSet, Rel], ...]:
        if not self.is_plain:
            raise InvalidInput("model has stratified relation tables")
        return self.tables[0].entries if self.tables else ()


@dataclass(frozen=True)
class CondIntModel(Frame):
    """Single valuation over p- and q-atoms; relations keyed by single world-sets."""

    size: int
    leq: frozenset[Pair]
    val: Mapping[Atom, frozenset[int]] = field(default_factory=dict)
    tables: tuple[IntTable, ...] = ()

    kind = "cint"

    @classmethod
    def build(cls, size: int, leq: Iterable[Pair] = (), val=None,
              relations: Mapping[frozenset[int], Iterable[Pair]] | None = None,
              tables: Iterable[IntTable] | None = None):
        leq = set(_freeze_rel(leq)) | {(w, w) for w in range(size)}
        if tables is None:
            tables = (IntTable.build(relations or {}),)
        return cls(size, frozenset(leq), _freeze_val(val), tuple(tables))

    @cached_property
    def val_masks(self) -> dict[Atom, int]:
        return {a: mask(ws) for a, ws in self.val.items()}

    @cached_property
    def _index(self):
        out = []
        for t in self.tables:
            d = self.full if t.domain is None else mask(t.domain)
            out.append((d, {mask(k): _succ_masks(self.size, r) for k, r in t.entries}))
        return out

    @cached_property
    def _lookup_cache(self) -> dict:
        return {}

    def successors(self, key_mask: int) -> tuple[int, ...]:
        cached = self._lookup_cache.get(key_mask)
        if cached is not None:
            return cached
        succ = [0] * self.size
        for d, entries in self._index:
            hit = entries.get(key_mask & d)
            if hit:
                succ = [a | b for a, b in zip(succ, hit)]
        result = tuple(succ)
        self._lookup_cache[key_mask] = result
        return result

    def relation(self, key: Iterable[int]) -> Rel:
        succ = self.successors(mask(key))
        return frozenset((w, v) for w in self.worlds for v in members(succ[w]))

    def violations(self) -> list[Violation]:
        out = self.frame_violations()
        if out:
            return out
        out = self.upset_violations("V", self.val)
        for t in self.tables:
            seen = set()
            d = frozenset(self.worlds) if t.domain is None else t.domain
            for key, rel in t.entries:
                if not key <= frozenset(self.worlds):
                    out.append(Violation("carrier", (sorted(key),), "key outside the carrier"))
                if key & d in seen:
                    out.append(Violation("duplicate-key", (sorted(key),), "two entries share a normalized key"))
                seen.add(key & d)
                out.extend(self.relation_violations(rel, "-i", sorted(key)))
        return out

    @property
    def is_plain(self) -> bool:
        return len(self.tables) <= 1 and all(t.domain is None for t in self.tables)

    def entries(self) -> tuple[tuple[frozenset[int], Rel], ...]:
        if not self.is_plain:
            raise InvalidInput("model has stratified relation tables")
        return self.tables[0].entries if self.tables else ()


@dataclass(frozen=True)
class ModalModel(Frame):
    """Modal model; ``vminus is None`` marks the intuitionistic flavor."""

    size: int
    leq: frozenset[Pair]
    vplus: Mapping[Atom, frozenset[int]] = field(default_factory=dict)
    vminus: Mapping[Atom, frozenset[int]] | None = None
    r: Rel = frozenset()

    @property
    def kind(self) -> str:
        return "mint" if self.vminus is None else "mnel"

    @property
    def nelsonian(self) -> bool:
        return self.vminus is not None

    @classmethod
    def build(cls, size: int, leq: Iterable[Pair] = (), vplus=None, vminus=None,
              r: Iterable[Pair] = (), intuitionistic: bool = False):
        leq = set(_freeze_rel(leq)) | {(w, w) for w in range(size)}
        vm = None if intuitionistic else _freeze_val(vminus)
        return cls(size, frozenset(leq), _freeze_val(vplus), vm, _freeze_rel(r))

    @cached_property
    def plus_masks(self) -> dict[Atom, int]:
        return {a: mask(ws) for a, ws in self.vplus.items()}

    @cached_property
    def minus_masks(self) -> dict[Atom, int]:
        return {a: mask(ws) for a, ws in (self.vminus or {}).items()}

    @cached_property
    def succ(self) -> tuple[int, ...]:
        return _succ_masks(self.size, self.r)

    def violations(self) -> list[Violation]:
        out = self.frame_violations()
        if out:
            return out
        out = self.upset_violations("V+" if self.nelsonian else "V", self.vplus)
        if self.nelsonian:
            out += self.upset_violations("V-", self.vminus)
        return out + self.relation_violations(self.r, "-m")


AnyModel = NelsonModel | CondNelsonModel | CondIntModel | ModalModel


def validate(model: AnyModel) -> list[Violation]:
    """Empty list iff every structural condition holds."""
    return model.violations()


def require_valid(model: AnyModel) -> None:
    problems = validate(model)
    if problems:
        raise InvalidInput("; ".join(str(v) for v in problems[:5]))


# ---------------------------------------------------------------- helpers

def rt_closure(size: int, pairs: Iterable[Pair]) -> frozenset[Pair]:
    """Reflexive-transitive closure."""
    reach = [1 << w for w in range(size)]
    for a, b in pairs:
        reach[a] |= 1 << b
    changed = True
    while changed:
        changed = False
        for w in range(size):
            acc = reach[w]
            for v in members(reach[w]):
                acc |= reach[v]
            if acc != reach[w]:
                reach[w] = acc
                changed = True
    return frozenset((w, v) for w in range(size) for v in members(reach[w]))


def upsets(size: int, up: tuple[int, ...]) -> list[int]:
    """All upward-closed subsets, as masks, in increasing numeric order."""
    out = []
    for m in range(1 << size):
        if all(not (m >> w & 1) or (up[w] & ~m) == 0 for w in range(size)):
            out.append(m)
    return out


def upward_closure(up: tuple[int, ...], m: int) -> int:
    out = m
    for w in range(len(up)):
        if m >> w & 1:
            out |= up[w]
    return out


# ---------------------------------------------------------------- constructions

def single_world_total(atom_set: Iterable[Atom]) -> CondNelsonModel:
    """One world verifying and falsifying every given atom, R = {(w, ({w},{w}), w)}."""
    atom_set = list(atom_set)
    everything = {a: {0} for a in atom_set}
    return CondNelsonModel.build(1, [(0, 0)], everything, everything,
                                 relations={BiSet.of({0}, {0}): {(0, 0)}})


def _shift_val(val: Mapping[Atom, frozenset[int]], offset: int) -> dict[Atom, set[int]]:
    return {a: {w + offset for w in ws} for a, ws in val.items()}


def _union_vals(*vals: Mapping[Atom, Iterable[int]]) -> dict[Atom, set[int]]:
    out: dict[Atom, set[int]] = {}
    for val in vals:
        for a, ws in val.items():
            out.setdefault(a, set()).update(ws)
    return out


def _shift_table(t: Table, offset: int, size: int) -> Table:
    def sh(ws):
        return frozenset(w + offset for w in ws)
    whole = frozenset(range(size))
    pd = sh(whole if t.plus_domain is None else t.plus_domain)
    md = sh(whole if t.minus_domain is None else t.minus_domain)
    entries = [(BiSet(sh(k.plus), sh(k.minus)), {(a + offset, b + offset) for a, b in r})
               for k, r in t.entries]
    return Table.build(entries, pd, md)


def join_with_root(m1: CondNelsonModel, m2: CondNelsonModel) -> tuple[CondNelsonModel, int]:
    """Disjoint union of two models under a fresh bottom world.

    Worlds of ``m1`` keep their numbers, ``m2`` follows, the root is last.
    Each original table is kept with its key domains moved into the joined
    carrier, so a key (X, Y) reaches the relation ``m_i`` stores at
    (X & W_i, Y & W_i).
    """
    n1, n2 = m1.size, m2.size
    root = n1 + n2
    leq = set(m1.leq) | {(a + n1, b + n1) for a, b in m2.leq}
    leq |= {(root, v) for v in range(root + 1)}
    vplus = _union_vals(m1.vplus, _shift_val(m2.vplus, n1))
    vminus = _union_vals(m1.vminus, _shift_val(m2.vminus, n1))
    tables = [_shift_table(t, 0, n1) for t in m1.tables]
    tables += [_shift_table(t, n1, n2) for t in m2.tables]
    joined = CondNelsonModel.build(root + 1, leq, vplus, vminus, tables=tables)
    return joined, root


def nelson_to_int_valuation(vplus, vminus) -> dict[Atom, frozenset[int]]:
    out = {}
    for a, ws in vplus.items():
        if a.primed:
            raise InvalidInput(f"Nelsonian valuation already mentions {a.name}")
        out[a] = ws
    for a, ws in vminus.items():
        if a.primed:
            raise InvalidInput(f"Nelsonian valuation already mentions {a.name}")
        out[Atom(a.index, True)] = ws
    return out


def int_to_nelson_valuation(val) -> tuple[dict, dict]:
    vplus, vminus = {}, {}
    for a, ws in val.items():
        (vminus if a.primed else vplus)[Atom(a.index)] = ws
    return vplus, vminus


def to_cond_int(m: CondNelsonModel, scheme: str = "pm") -> CondIntModel:
    """Conditional-intuitionistic companion with one extra world per stored triple.

    With ``scheme="pm"`` a triple t = (w, (X, Y), v) is entered from w under
    keys meeting the original worlds in X and left towards v under keys
    meeting them in Y.  ``scheme="mp"`` swaps the two roles.  Triples are
    ordered by key, then by (w, v), and numbered after the original worlds.
    """
    require_valid(m)
    if scheme not in ("pm", "mp"):
        raise ValueError(f"unknown scheme {scheme!r}")
    n = m.size
    triples = []
    for key, rel in m.entries():
        for w, v in sorted(rel):
            triples.append((w, key, v))
    number = {t: n + i for i, t in enumerate(triples)}
    leq = set(m.leq)
    for t1 in triples:
        for t2 in triples:
            if t1[1] == t2[1] and (t1[0], t2[0]) in m.leq and (t1[2], t2[2]) in m.leq:
                leq.add((number[t1], number[t2]))
    rel: dict[frozenset[int], set[Pair]] = {}
    for t in triples:
        w, key, v = t
        first, second = (key.plus, key.minus) if scheme == "pm" else (key.minus, key.plus)
        rel.setdefault(first, set()).add((w, number[t]))
        rel.setdefault(second, set()).add((number[t], v))
    size = n + len(triples)
    table = IntTable.build(rel, domain=range(n))
    return CondIntModel.build(size, leq, nelson_to_int_valuation(m.vplus, m.vminus), tables=[table])


def to_cond_nelson(m: CondIntModel, scheme: str = "pm") -> CondNelsonModel:
    """Nelsonian companion on the same frame.

    ``pm``: R(X, Y) = R_X then R_Y; ``mp``: R_Y then R_X; ``plus``: R_X alone;
    ``minus``: R_Y alone.  The result reuses the key domains of ``m``.
    """
    require_valid(m)
    vplus, vminus = int_to_nelson_valuation(m.val)
    tables = []
    for t in m.tables:
        dom = t.domain
        if scheme == "plus":
            entries = [(BiSet(k, frozenset()), r) for k, r in t.entries]
            tables.append(Table.build(entries, dom, frozenset()))
        elif scheme == "minus":
            entries = [(BiSet(frozenset(), k), r) for k, r in t.entries]
            tables.append(Table.build(entries, frozenset(), dom))
        elif scheme in ("pm", "mp"):
            if len(m.tables) > 1:
                raise InvalidInput("composition needs a single relation table")
            entries = []
            for (kx, rx), (ky, ry) in product(t.entries, repeat=2):
                composed = {(a, c) for a, b in rx for b2, c in ry if b == b2}
                key = BiSet(kx, ky) if scheme == "pm" else BiSet(ky, kx)
                if composed:
                    entries.append((key, composed))
            tables.append(Table.build(entries, dom, dom))
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
    return CondNelsonModel.build(m.size, m.leq, vplus, vminus, tables=tables)


def nel_to_int(m: NelsonModel) -> CondIntModel:
    """Propositional relabeling: V(p_i) = V+(p_i), V(q_i) = V-(p_i)."""
    return CondIntModel.build(m.size, m.leq, nelson_to_int_valuation(m.vplus, m.vminus))


def int_to_nel(m: CondIntModel) -> NelsonModel:
    vplus, vminus = int_to_nelson_valuation(m.val)
    return NelsonModel.build(m.size, m.leq, vplus, vminus)


def relabel_modal(m: ModalModel, direction: str) -> ModalModel:
    require_valid(m)
    if direction == "nelsonToInt":
        if not m.nelsonian:
            raise InvalidInput("expected a Nelsonian modal model")
        val = nelson_to_int_valuation(m.vplus, m.vminus)
        return ModalModel(m.size, m.leq, _freeze_val(val), None, m.r)
    if direction == "intToNelson":
        if m.nelsonian:
            raise InvalidInput("expected an intuitionistic modal model")
        vplus, vminus = int_to_nelson_valuation(m.vplus)
        return ModalModel(m.size, m.leq, _freeze_val(vplus), _freeze_val(vminus), m.r)
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------- file format

def _val_json(val) -> dict:
    return {a.name: sorted(ws) for a, ws in val.items()}


def _val_from(obj) -> dict[Atom, set[int]]:
    from .syntax import parse
    out = {}
    for name, ws in (obj or {}).items():
        a = parse(name)
        if not isinstance(a, Atom):
            raise InvalidInput(f"not an atom: {name!r}")
        out[a] = set(ws)
    return out


def _pairs(rel) -> list[list[int]]:
    return [list(p) for p in sorted(rel)]


def model_to_dict(m: AnyModel) -> dict:
    out: dict = {"type": m.kind, "worlds": m.size, "leq": _pairs(m.leq)}
    if isinstance(m, CondIntModel):
        out["vplus"] = _val_json(m.val)
        if m.is_plain:
            out["relations"] = [{"key": sorted(k), "pairs": _pairs(r)} for k, r in m.entries()]
        else:
            out["tables"] = [{"domain": None if t.domain is None else sorted(t.domain),
                              "relations": [{"key": sorted(k), "pairs": _pairs(r)} for k, r in t.entries]}
                             for t in m.tables]
        return out
    if isinstance(m, ModalModel):
        out["vplus"] = _val_json(m.vplus)
        if m.nelsonian:
            out["vminus"] = _val_json(m.vminus)
        out["r"] = _pairs(m.r)
        return out
    out["vplus"] = _val_json(m.vplus)
    out["vminus"] = _val_json(m.vminus)
    if isinstance(m, CondNelsonModel):
        def rels(t):
            return [{"plusKey": sorted(k.plus), "minusKey": sorted(k.minus), "pairs": _pairs(r)}
                    for k, r in t.entries]
        if m.is_plain:
            out["relations"] = rels(m.tables[0]) if m.tables else []
        else:
            out["tables"] = [{"plusDomain": None if t.plus_domain is None else sorted(t.plus_domain),
                              "minusDomain": None if t.minus_domain is None else sorted(t.minus_domain),
                              "relations": rels(t)} for t in m.tables]
    return out


def model_from_dict(obj: dict) -> AnyModel:
    try:
        kind = obj["type"]
        size = int(obj["worlds"])
        leq = [tuple(p) for p in obj.get("leq", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed model: {exc}") from exc
    leq = leq or [(w, w) for w in range(size)]
    if kind == "nel":
        return NelsonModel.build(size, leq, _val_from(obj.get("vplus")), _val_from(obj.get("vminus")))
    if kind == "cnel":
        def table(rels, pd=None, md=None):
            return _table_from(rels, pd, md)
        if "tables" in obj:
            tables = [table(t.get("relations", []), t.get("plusDomain"), t.get("minusDomain"))
                      for t in obj["tables"]]
        else:
            tables = [table(obj.get("relations", []))]
        return CondNelsonModel.build(size, leq, _val_from(obj.get("vplus")),
                                     _val_from(obj.get("vminus")), tables=tables)
    if kind == "cint":
        if "tables" in obj:
            tables = [_int_table_from(t.get("relations", []), t.get("domain")) for t in obj["tables"]]
        else:
            tables = [_int_table_from(obj.get("relations", []))]
        return CondIntModel.build(size, leq, _val_from(obj.get("vplus")), tables=tables)
    if kind in ("mnel", "mint"):
        return ModalModel.build(size, leq, _val_from(obj.get("vplus")), _val_from(obj.get("vminus")),
                                [tuple(p) for p in obj.get("r", [])], intuitionistic=kind == "mint")
    raise InvalidInput(f"unknown model type {kind!r}")


def _table_from(rels, pd, md) -> Table:
    # duplicates are kept so that validate can report them
    entries = tuple((BiSet.of(e.get("plusKey", []), e.get("minusKey", [])),
                     _freeze_rel(tuple(p) for p in e.get("pairs", []))) for e in rels)
    return Table(entries, None if pd is None else frozenset(pd), None if md is None else frozenset(md))


def _int_table_from(rels, dom=None) -> IntTable:
    entries = tuple((frozenset(e.get("key", [])), _freeze_rel(tuple(p) for p in e.get("pairs", [])))
                    for e in rels)
    return IntTable(entries, None if dom is None else frozenset(dom))


def dumps(m: AnyModel) -> str:
    return json.dumps(model_to_dict(m), indent=2) + "\n"


def loads(text: str) -> AnyModel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"model file is not valid JSON: {exc}") from exc
    return model_from_dict(obj)
