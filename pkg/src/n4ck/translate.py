"""Translations between the languages, with their model-level harnesses and
the proof translation between FSKd and N4CK.

The E family sends Nelsonian formulas to positive formulas over p- and
q-atoms; ``~p_i`` becomes ``q_i``.  Its recursion is by cases on the outer
``~`` pattern, so no negation normal form is computed first.  The Tr family
reads modal boxes as conditionals with a fixed antecedent (the anchor), and
TrBar forgets conditional antecedents.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .kripke import (nel_to_int, int_to_nel, relabel_modal, to_cond_int, to_cond_nelson)
from .proofs import (CORPUS_ORDER, Axiom, Cite, Derivation, DeltaDisjunction, Library, N4Step,
                     Premise, RuleApp, SingleFormula, Step, StepError, SCHEMAS, check_derivation,
                     corpus_library, match_schema, read_script)
from .search import (CONNECTIVES, Certificate, SearchBudget, find_countermodel, random_formula,
                     sample_model)
from .semantics import IllFormed, int_mask, positive_mask
from .syntax import (And, Atom, Box, BoxTo, DiamTo, Diamond, Formula, Imp, Lang, Meta, Neg, Or,
                     apply_subst, children, expand, language_violation, p, parse, q, rebuild,
                     subformulas, to_text)


class AnchorMissing(ValueError):
    pass


class SourceUnchecked(ValueError):
    pass


class UnmappableStep(ValueError):
    pass


# ---------------------------------------------------------------- mappings

class MapKind(enum.Enum):
    E = "e"
    EPM = "epm"
    EMP = "emp"
    EPLUS = "eplus"
    EMINUS = "eminus"
    EM = "em"
    TRI = "tri"
    TR = "tr"
    TRBAR = "trbar"


_ANCHORED = (MapKind.TRI, MapKind.TR)

# source language, target language
_LANGS = {
    MapKind.E: (Lang.L, Lang.LePlus),
    MapKind.EPM: (Lang.LBoxto, Lang.LeBoxtoDiamto),
    MapKind.EMP: (Lang.LBoxto, Lang.LeBoxtoDiamto),
    MapKind.EPLUS: (Lang.LBoxto, Lang.LeBoxtoDiamto),
    MapKind.EMINUS: (Lang.LBoxto, Lang.LeBoxtoDiamto),
    MapKind.EM: (Lang.LBox, Lang.LeBoxDiamond),
    MapKind.TR: (Lang.LBox, Lang.LBoxto),
    MapKind.TRBAR: (Lang.LBoxto, Lang.LBox),
}


@dataclass(frozen=True)
class MappingId:
    kind: MapKind
    anchor: Formula | None = None

    def __post_init__(self):
        if self.kind in _ANCHORED and self.anchor is None:
            raise AnchorMissing(f"{self.kind.value} needs an anchor formula")
        if self.kind not in _ANCHORED and self.anchor is not None:
            raise ValueError(f"{self.kind.value} takes no anchor")

    @classmethod
    def parse(cls, text: str) -> "MappingId":
        """``e``, ``epm``, ..., ``tri:<formula>``, ``tr:<formula>``, ``trbar``."""
        name, colon, rest = text.partition(":")
        try:
            kind = MapKind(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown mapping {name!r}") from None
        if kind in _ANCHORED:
            if not colon or not rest.strip():
                raise AnchorMissing(f"write {kind.value}:<formula>")
            return cls(kind, parse(rest))
        if colon:
            raise ValueError(f"{kind.value} takes no anchor")
        return cls(kind)

    def __str__(self) -> str:
        return self.kind.value + (f":{to_text(self.anchor)}" if self.anchor is not None else "")


def _require(f: Formula, lang: Lang, what: str) -> None:
    problem = language_violation(f, lang)
    if problem:
        raise IllFormed(f"{what}: {problem}")
    if any(isinstance(g, Meta) for g in subformulas(f)):
        raise IllFormed(f"{what}: metavariables have no translation")


def _nelson_family(f: Formula, conditional: Callable | None) -> Formula:
    """Shared E recursion; ``conditional(negated, node, rec)`` handles boxes and conditionals."""

    def rec(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return g
        if isinstance(g, (And, Or, Imp)):
            return rebuild(g, (rec(g.left), rec(g.right)))
        if isinstance(g, Neg):
            h = g.sub
            if isinstance(h, Atom):
                return q(h.index)
            if isinstance(h, Neg):
                return rec(h.sub)
            if isinstance(h, And):
                return Or(rec(Neg(h.left)), rec(Neg(h.right)))
            if isinstance(h, Or):
                return And(rec(Neg(h.left)), rec(Neg(h.right)))
            if isinstance(h, Imp):
                return And(rec(h.left), rec(Neg(h.right)))
            if conditional is not None:
                return conditional(True, h, rec)
        elif conditional is not None:
            return conditional(False, g, rec)
        raise IllFormed(f"no clause for {to_text(g)}")

    return rec(f)


def _epm(negated, g, rec):
    if not isinstance(g, BoxTo):
        raise IllFormed(f"no clause for {to_text(g)}")
    a, b = g.antecedent, g.consequent
    if negated:
        return DiamTo(rec(a), DiamTo(rec(Neg(a)), rec(Neg(b))))
    return BoxTo(rec(a), BoxTo(rec(Neg(a)), rec(b)))


def _emp(negated, g, rec):
    if not isinstance(g, BoxTo):
        raise IllFormed(f"no clause for {to_text(g)}")
    a, b = g.antecedent, g.consequent
    if negated:
        return DiamTo(rec(Neg(a)), DiamTo(rec(a), rec(Neg(b))))
    return BoxTo(rec(Neg(a)), BoxTo(rec(a), rec(b)))


def _eplus(negated, g, rec):
    if not isinstance(g, BoxTo):
        raise IllFormed(f"no clause for {to_text(g)}")
    if negated:
        return DiamTo(rec(g.antecedent), rec(Neg(g.consequent)))
    return BoxTo(rec(g.antecedent), rec(g.consequent))


def _eminus(negated, g, rec):
    if not isinstance(g, BoxTo):
        raise IllFormed(f"no clause for {to_text(g)}")
    if negated:
        return DiamTo(rec(Neg(g.antecedent)), rec(Neg(g.consequent)))
    return BoxTo(rec(Neg(g.antecedent)), rec(g.consequent))


def _em(negated, g, rec):
    if not isinstance(g, Box):
        raise IllFormed(f"no clause for {to_text(g)}")
    return Diamond(rec(Neg(g.sub))) if negated else Box(rec(g.sub))


_E_CLAUSES = {MapKind.E: None, MapKind.EPM: _epm, MapKind.EMP: _emp, MapKind.EPLUS: _eplus,
              MapKind.EMINUS: _eminus, MapKind.EM: _em}


def _anchored(f: Formula, anchor: Formula, keep_diamonds: bool) -> Formula:
    def rec(g: Formula) -> Formula:
        if isinstance(g, Box):
            return BoxTo(anchor, rec(g.sub))
        if isinstance(g, Diamond):
            if not keep_diamonds:
                raise IllFormed("expand diamonds first")
            return DiamTo(anchor, rec(g.sub))
        if isinstance(g, (BoxTo, DiamTo)):
            raise IllFormed(f"{to_text(g)} is not a modal formula")
        kids = children(g)
        return rebuild(g, tuple(rec(k) for k in kids)) if kids else g

    return rec(f)


def _forget_antecedents(f: Formula) -> Formula:
    if isinstance(f, BoxTo):
        return Box(_forget_antecedents(f.consequent))
    if isinstance(f, (Box, Diamond, DiamTo)):
        raise IllFormed(f"{to_text(f)} is not in LBoxto")
    kids = children(f)
    return rebuild(f, tuple(_forget_antecedents(k) for k in kids)) if kids else f


def apply(mapping: MappingId | str, f: Formula) -> Formula:
    """Translate ``f``; abbreviations the source language does not have primitively are expanded first."""
    if isinstance(mapping, str):
        mapping = MappingId.parse(mapping)
    kind = mapping.kind
    if kind is MapKind.TRI:
        # defined on modal formulas with <> primitive; extended (q-atom) inputs and
        # anchors are accepted so that it composes with E^m
        for g in subformulas(f):
            if isinstance(g, (BoxTo, DiamTo, Meta)):
                raise IllFormed(f"{to_text(f)} is not a modal formula")
        anchor = mapping.anchor
        if any(isinstance(g, (Box, Diamond, Meta)) for g in subformulas(anchor)):
            raise IllFormed("the anchor must be a conditional formula")
        return _anchored(f, anchor, keep_diamonds=True)
    source, target = _LANGS[kind]
    f = expand(f)
    _require(f, source, f"{kind.value} input")
    if kind is MapKind.TR:
        anchor = expand(mapping.anchor)
        _require(anchor, Lang.LBoxto, "tr anchor")
        out = _anchored(f, anchor, keep_diamonds=False)
    elif kind is MapKind.TRBAR:
        out = _forget_antecedents(f)
    else:
        if any(a.primed for a in _atoms(f)):
            raise IllFormed("q-atoms are not in the source language")
        out = _nelson_family(f, _E_CLAUSES[kind])
    _require(out, target, f"{kind.value} output")
    return out


def _atoms(f: Formula) -> list[Atom]:
    return [g for g in subformulas(f) if isinstance(g, Atom)]


def e_map(f: Formula) -> Formula:
    return apply(MappingId(MapKind.E), f)


def tr(anchor: Formula, f: Formula) -> Formula:
    return apply(MappingId(MapKind.TR, anchor), f)


def tr_i(anchor: Formula, f: Formula) -> Formula:
    return apply(MappingId(MapKind.TRI, anchor), f)


def tr_bar(f: Formula) -> Formula:
    return apply(MappingId(MapKind.TRBAR), f)


# ---------------------------------------------------------------- harnesses

@dataclass(frozen=True)
class Witness:
    claim: str
    formula: Formula
    translated: Formula
    model: object          # the model the formula was evaluated on
    companion: object      # the transformed model the translation was evaluated on
    world: int
    source_value: bool
    target_value: bool


@dataclass
class FaithfulnessReport:
    mapping: str
    trials: dict[str, int] = field(default_factory=dict)
    violations: list[Witness] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


_SOURCE_LOGIC = {MapKind.E: "N4", MapKind.EPM: "N4CK", MapKind.EMP: "N4CK",
                 MapKind.EPLUS: "N4CK", MapKind.EMINUS: "N4CK", MapKind.EM: "FSKd"}
_TARGET_SAMPLER = {"N4": "IntCK", "N4CK": "IntCK", "FSKd": "IK"}


def _claims(kind: MapKind) -> dict[str, tuple]:
    """claim name -> (sample the source side?, transformation)."""
    if kind is MapKind.E:
        return {"nelson-to-int": (True, nel_to_int), "int-to-nelson": (False, int_to_nel)}
    if kind in (MapKind.EPM, MapKind.EMP):
        scheme = "pm" if kind is MapKind.EPM else "mp"
        return {"nelson-to-int": (True, lambda m: to_cond_int(m, scheme)),
                "int-to-nelson": (False, lambda m: to_cond_nelson(m, scheme))}
    if kind is MapKind.EM:
        return {"nelson-to-int": (True, lambda m: relabel_modal(m, "nelsonToInt")),
                "int-to-nelson": (False, lambda m: relabel_modal(m, "intToNelson"))}
    if kind in (MapKind.EPLUS, MapKind.EMINUS):
        # only the direction that yields preservation of consequence
        scheme = "plus" if kind is MapKind.EPLUS else "minus"
        return {"int-to-nelson": (False, lambda m: to_cond_nelson(m, scheme))}
    raise ValueError(f"no model transformation is paired with {kind.value}")


def faithfulness_harness(mapping: MappingId | str, trials: int = 1000, seed: int = 0,
                         max_worlds: int = 3, depth: int = 3, letters: int = 3) -> FaithfulnessReport:
    """Sample (model, formula) pairs and compare the formula on one side with its
    translation on the transformed model, at every world of the source model.

    On the Nelsonian side only verification is compared; the translation of
    ``~f`` covers falsification.
    """
    if isinstance(mapping, str):
        mapping = MappingId.parse(mapping)
    kind = mapping.kind
    logic = _SOURCE_LOGIC.get(kind)
    if logic is None:
        raise ValueError(f"no model transformation is paired with {kind.value}")
    rng = random.Random(seed)
    plain = [p(i) for i in range(letters)]
    extended = plain + [q(i) for i in range(letters)]
    budget = SearchBudget(max_worlds=max_worlds, seed=seed)
    report = FaithfulnessReport(str(mapping))
    for claim, (nelson_side, transform) in _claims(kind).items():
        for trial in range(trials):
            f = expand(random_formula(rng, depth, plain, CONNECTIVES[logic]))
            g = apply(mapping, f)
            if nelson_side:
                m = sample_model(logic, plain, budget, rng)
                companion = transform(m)
                source = positive_mask(m, f, logic)
                target = int_mask(companion, g) & m.full
                nel, intm = m, companion
            else:
                m = sample_model(_TARGET_SAMPLER[logic], extended, budget, rng)
                companion = transform(m)
                source = positive_mask(companion, f, logic)
                target = int_mask(m, g)
                nel, intm = companion, m
            diff = source ^ target
            if diff:
                w = (diff & -diff).bit_length() - 1
                report.violations.append(Witness(claim, f, g, m, companion, w,
                                                 bool(source >> w & 1), bool(target >> w & 1)))
        report.trials[claim] = trials
    return report


@dataclass(frozen=True)
class ConverseFailure:
    """A consequence that holds between translations but fails in N4CK."""
    gamma: tuple[Formula, ...]
    delta: tuple[Formula, ...]
    translated_gamma: tuple[Formula, ...]
    translated_delta: tuple[Formula, ...]
    certificate: Certificate


CONVERSE_PAIRS = {
    MapKind.EPLUS: ((parse("(p1 /\\ ~p2) []-> p3"),), (parse("~(p1 -> p2) []-> p3"),)),
    MapKind.EMINUS: ((parse("~(p1 /\\ ~p2) []-> p3"),), (parse("(p1 -> p2) []-> p3"),)),
}


def converse_failure(mapping: MappingId | str, gamma: Sequence[Formula] | None = None,
                     delta: Sequence[Formula] | None = None,
                     budget: SearchBudget | None = None) -> ConverseFailure | None:
    """Witness that the translated consequence holds while the original fails.

    The translated side is settled syntactically: some translated member of
    ``delta`` literally occurs among the translated members of ``gamma``,
    which makes the consequence hold in every intuitionistic model.  The
    original side needs an N4CK countermodel within ``budget``.
    """
    if isinstance(mapping, str):
        mapping = MappingId.parse(mapping)
    if gamma is None or delta is None:
        gamma, delta = CONVERSE_PAIRS[mapping.kind]
    tg = tuple(apply(mapping, f) for f in gamma)
    td = tuple(apply(mapping, f) for f in delta)
    if not set(tg) & set(td):
        return None
    found = find_countermodel("N4CK", gamma, delta, budget or SearchBudget(max_worlds=3))
    if not isinstance(found, Certificate):
        return None
    return ConverseFailure(tuple(gamma), tuple(delta), tg, td, found)


# ---------------------------------------------------------------- proof translation

class Direction(enum.Enum):
    FSKD_TO_N4CK = "fskd-to-n4ck"
    N4CK_TO_FSKD = "n4ck-to-fskd"

    @property
    def source(self) -> str:
        return "FSKd" if self is Direction.FSKD_TO_N4CK else "N4CK"

    @property
    def target(self) -> str:
        return "N4CK" if self is Direction.FSKD_TO_N4CK else "FSKd"


TRANSLATED_PREFIX = "tr."

# axiom -> (justification kind, name, bindings from the source instance's bindings)
# "ax" reuses a target axiom, "cite" a target corpus script
_FORWARD_AXIOMS = {
    "a1": ("ax", "A1", lambda b, t, a: {"phi": a, "psi": t(b["phi"]), "chi": t(b["psi"])}),
    "a2": ("ax", "A4", lambda b, t, a: {"phi": a, "psi": t(b["phi"])}),
    "a3": ("cite", "T4", lambda b, t, a: {"phi": a, "psi": t(b["phi"]), "chi": t(b["psi"])}),
    "a4": ("cite", "T5", lambda b, t, a: {"phi": a, "psi": t(b["phi"]), "chi": t(b["psi"])}),
    "a5": ("ax", "A3", lambda b, t, a: {"phi": a, "psi": t(b["phi"]), "chi": t(b["psi"])}),
    "a6": ("cite", "T6", lambda b, t, a: {"phi": a, "psi": t(b["phi"])}),
}
_FORWARD_RULES = {"rmBox": "RMbox", "rmDiam": "RMdiam"}

_BACKWARD_AXIOMS = {
    "A1": ("cite", "t2", lambda b, t, a: {"phi": t(b["psi"]), "psi": t(b["chi"])}),
    "A2": ("cite", "t3", lambda b, t, a: {"phi": t(b["psi"]), "psi": t(b["chi"])}),
    "A3": ("ax", "a5", lambda b, t, a: {"phi": t(b["psi"]), "psi": t(b["chi"])}),
    "A4": ("ax", "a2", lambda b, t, a: {"phi": t(b["psi"])}),
}
_BACKWARD_RULES = {"RCbox1": "rBox", "RCbox2": "rnegBox"}


def _schematic(direction: Direction, anchor: Formula | None) -> Callable[[Formula], Formula]:
    """The formula map, extended to schematic formulas (metavariables map to themselves)."""
    if direction is Direction.FSKD_TO_N4CK:
        return lambda f: _anchored(expand(f), anchor, keep_diamonds=False)
    return lambda f: _forget_antecedents(expand(f))


def _full_bindings(schema: Formula, f: Formula, given: Mapping[str, Formula]) -> dict:
    sigma = match_schema(expand(schema), expand(f), {k: expand(v) for k, v in given.items()})
    if sigma is None:
        raise UnmappableStep(f"{to_text(f)} is not an instance of {to_text(schema)}")
    return sigma


def translate_proof(d: Derivation, direction: Direction | str, anchor: Formula | None = None,
                    library: Library | None = None, check_source: bool = True) -> Derivation:
    """Translate a derivation step by step.

    Steps that the tables send to a consequence rather than an instance get an
    extra ``n4`` step.  Citations of source scripts become citations of their
    translations, registered as ``tr.<name>`` (see :func:`translated_library`).
    """
    if isinstance(direction, str):
        direction = Direction(direction)
    if d.system != direction.source:
        raise UnmappableStep(f"expected a {direction.source} derivation, got {d.system}")
    if direction is Direction.FSKD_TO_N4CK:
        if anchor is None:
            raise AnchorMissing("the modal-to-conditional direction needs an anchor")
        anchor = expand(anchor)
        _require(anchor, Lang.LBoxto, "anchor")
    library = library if library is not None else corpus_library()
    if check_source:
        try:
            check_derivation(d, library)
        except StepError as exc:
            raise SourceUnchecked(str(exc)) from exc
    t = _schematic(direction, anchor)
    axioms = _FORWARD_AXIOMS if direction is Direction.FSKD_TO_N4CK else _BACKWARD_AXIOMS
    rules = _FORWARD_RULES if direction is Direction.FSKD_TO_N4CK else _BACKWARD_RULES
    target_library = corpus_library()

    out: list[Step] = []
    where: dict[int, int] = {}

    def emit(f: Formula, j) -> int:
        out.append(Step(f, j))
        return len(out)

    def refs(rs: Iterable[int]) -> tuple[int, ...]:
        return tuple(where[r] for r in rs)

    for no, step in enumerate(d.steps, start=1):
        f, j = step.formula, step.justification
        image = t(f)
        if isinstance(j, Premise):
            where[no] = emit(image, j)
        elif isinstance(j, N4Step):
            where[no] = emit(image, N4Step(refs(j.refs), j.base))
        elif isinstance(j, RuleApp) and j.rule == "MP":
            where[no] = emit(image, RuleApp("MP", refs(j.refs)))
        elif isinstance(j, RuleApp) and j.rule in rules:
            where[no] = emit(image, Cite(rules[j.rule], {}, refs(j.refs)))
        elif isinstance(j, RuleApp) and j.rule == "RAbox" and direction is Direction.N4CK_TO_FSKD:
            # both sides of the conclusion forget the antecedent; what is left is an N4 tautology
            where[no] = emit(image, N4Step((), "n4"))
        elif isinstance(j, Axiom) and j.schema in axioms:
            how, name, bind = axioms[j.schema]
            sigma = _full_bindings(SCHEMAS[j.schema], f, j.bindings)
            b = bind(sigma, t, anchor)
            if how == "ax":
                stated = apply_subst(SCHEMAS[name], b)
                just = Axiom(name, b)
            else:
                stated = apply_subst(target_library.get(direction.target, name).statement, b)
                just = Cite(name, b, ())
            if expand(stated) == expand(image):
                where[no] = emit(image, just)
            else:
                first = emit(stated, just)
                where[no] = emit(image, N4Step((first,), "n4"))
        elif isinstance(j, Axiom):
            # N4 axioms: the maps commute with every propositional connective
            where[no] = emit(image, Axiom(j.schema, {k: t(v) for k, v in j.bindings.items()}))
        elif isinstance(j, Cite):
            where[no] = emit(image, Cite(TRANSLATED_PREFIX + j.script,
                                         {k: t(v) for k, v in j.bindings.items()}, refs(j.refs)))
        else:
            raise UnmappableStep(f"step {no}: no translation for {j!r}")

    goal = d.goal
    if isinstance(goal, SingleFormula):
        goal = SingleFormula(t(goal.formula))
    elif isinstance(goal, DeltaDisjunction):
        goal = DeltaDisjunction(tuple(t(x) for x in goal.items))
    else:
        raise UnmappableStep("absurdity goals have no translation")
    name = TRANSLATED_PREFIX + d.name if d.name else None
    return Derivation(direction.target, d.mode, tuple(t(x) for x in d.premises), goal,
                      tuple(out), name, ())


def translated_corpus(direction: Direction | str, anchor: Formula | None = None
                      ) -> tuple[list[tuple[str, Derivation]], Library]:
    """Translate every corpus script of the source system, checking each one.

    Returns the translations (keyed ``target/tr.<name>``) and a library holding
    the checked corpus plus the translations, so later scripts can cite earlier
    translated ones.
    """
    if isinstance(direction, str):
        direction = Direction(direction)
    base = corpus_library()
    library = Library()
    for key, d in base:
        library.add(key, d)
    out = []
    for name in CORPUS_ORDER[direction.source]:
        source = base.get(direction.source, name)
        translated = translate_proof(source, direction, anchor, base, check_source=False)
        check_derivation(translated, library)
        key = f"{direction.target}/{TRANSLATED_PREFIX}{name}"
        library.add(key, translated)
        out.append((key, translated))
    return out, library
