"""Hilbert systems, derivations and the derivation checker.

A derivation is a numbered list of steps, each a formula with a
justification.  Formulas are compared after ``expand`` so that ``<>->`` and
``<>`` may be written freely.  Propositional reasoning is compressed into
``n4`` steps (also ``cl``/``il`` in classical and intuitionistic systems):
the cited formulas must entail the step's formula in the base logic once
maximal conditional or modal subformulas and metavariables are replaced by
atoms.
"""

from __future__ import annotations

import enum
import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .decide import Refuted, abstract_conditionals, decide_cl, decide_il, decide_n4
from .syntax import (ABSURDITY, Formula, Lang, LanguageError, Meta, apply_subst, disjunction,
                     expand, language_violation, match_schema, metas, parse, parse_schema, to_text)


# ---------------------------------------------------------------- schemas

_SCHEMA_TEXT = {
    "alpha1": "phi -> (psi -> phi)",
    "alpha2": "(phi -> (psi -> chi)) -> ((phi -> psi) -> (phi -> chi))",
    "alpha3": "(phi /\\ psi) -> phi",
    "alpha4": "(phi /\\ psi) -> psi",
    "alpha5": "phi -> (psi -> (phi /\\ psi))",
    "alpha6": "phi -> (phi \\/ psi)",
    "alpha7": "psi -> (phi \\/ psi)",
    "alpha8": "(phi -> chi) -> ((psi -> chi) -> ((phi \\/ psi) -> chi))",
    "An1": "~~phi <-> phi",
    "An2": "~(phi /\\ psi) <-> (~phi \\/ ~psi)",
    "An3": "~(phi \\/ psi) <-> (~phi /\\ ~psi)",
    "An4": "~(phi -> psi) <-> (phi /\\ ~psi)",
    "An5": "(phi -> psi) -> ((phi -> ~psi) -> ~phi)",
    "An6": "phi -> (~phi -> psi)",
    "An7": "phi \\/ ~phi",
    "A1": "((phi []-> psi) /\\ (phi []-> chi)) <=> (phi []-> (psi /\\ chi))",
    "A2": "(~(phi []-> psi) /\\ (phi []-> chi)) -> ~(phi []-> (psi \\/ ~chi))",
    "A3": "((phi <>-> psi) -> (phi []-> chi)) -> (phi []-> (psi -> chi))",
    "A4": "phi []-> (psi -> psi)",
    "a1": "([]phi /\\ []psi) -> [](phi /\\ psi)",
    "a2": "[](phi -> phi)",
    "a3": "<>(phi \\/ psi) -> (<>phi \\/ <>psi)",
    "a4": "<>(phi -> psi) -> ([]phi -> <>psi)",
    "a5": "(<>phi -> []psi) -> [](phi -> psi)",
    "a6": "~[]phi <-> <>~phi",
}

SCHEMAS: dict[str, Formula] = {k: parse_schema(v) for k, v in _SCHEMA_TEXT.items()}


@dataclass(frozen=True)
class Rule:
    name: str
    premises: tuple[Formula, ...]
    conclusion: Formula


def _rule(name: str, premises: Sequence[str], conclusion: str) -> Rule:
    return Rule(name, tuple(parse_schema(p) for p in premises), parse_schema(conclusion))


RULES: dict[str, Rule] = {r.name: r for r in [
    _rule("MP", ["phi", "phi -> psi"], "psi"),
    _rule("RAbox", ["phi <=> psi"], "(phi []-> chi) <=> (psi []-> chi)"),
    _rule("RCbox1", ["phi <-> psi"], "(chi []-> phi) <-> (chi []-> psi)"),
    _rule("RCbox2", ["~phi <-> ~psi"], "~(chi []-> phi) <-> ~(chi []-> psi)"),
    _rule("RAprimeBox", ["phi <-> psi"], "(phi []-> chi) <=> (psi []-> chi)"),
    _rule("rmBox", ["phi -> psi"], "[]phi -> []psi"),
    _rule("rmDiam", ["phi -> psi"], "<>phi -> <>psi"),
]}


# ---------------------------------------------------------------- systems

@dataclass(frozen=True)
class System:
    name: str
    axioms: tuple[str, ...]
    rules: tuple[str, ...]
    lang: Lang
    iota: bool
    bases: tuple[str, ...]       # accepted propositional step kinds
    semantics: str | None = None  # logic name understood by the semantics module


_ALPHA = tuple(f"alpha{i}" for i in range(1, 9))
_N4 = _ALPHA + ("An1", "An2", "An3", "An4")
_IL = _ALPHA + ("An5", "An6")
_CL = _IL + ("An7",)

SYSTEMS: dict[str, System] = {s.name: s for s in [
    System("ILplus", _ALPHA, ("MP",), Lang.LePlus, False, ("il", "n4")),
    System("N4", _N4, ("MP",), Lang.L, False, ("n4",), "N4"),
    System("IL", _IL, ("MP",), Lang.L, True, ("il",)),
    System("CL", _CL, ("MP",), Lang.L, True, ("cl", "il", "n4")),
    System("N4CK", _N4 + ("A1", "A2", "A3", "A4"), ("MP", "RAbox", "RCbox1", "RCbox2"),
           Lang.LBoxto, False, ("n4",), "N4CK"),
    System("N4CKprime", _N4 + ("A1", "A2", "A3", "A4"),
           ("MP", "RAbox", "RCbox1", "RCbox2", "RAprimeBox"), Lang.LBoxto, False, ("n4",), "N4CK"),
    System("CK", _CL + ("A1", "A4"), ("MP", "RAbox", "RCbox1"), Lang.LBoxto, True,
           ("cl", "il", "n4")),
    System("FSKd", _N4 + ("a1", "a2", "a3", "a4", "a5", "a6"), ("MP", "rmBox", "rmDiam"),
           Lang.LBox, False, ("n4",), "FSKd"),
]}


def get_system(name: str) -> System:
    for key, s in SYSTEMS.items():
        if key.lower() == name.lower():
            return s
    raise ValueError(f"unknown system {name!r}")


# ---------------------------------------------------------------- derivations

class Mode(enum.Enum):
    THEOREM = "theorem"
    CONSEQUENCE = "consequence"
    DERIVED_RULE = "derived-rule"

    @classmethod
    def from_name(cls, name: str) -> "Mode":
        key = name.strip().lower().replace("_", "-")
        aliases = {"derivedrule": "derived-rule"}
        key = aliases.get(key, key)
        for m in cls:
            if m.value == key:
                return m
        raise ValueError(f"unknown mode {name!r}")


@dataclass(frozen=True)
class SingleFormula:
    formula: Formula


@dataclass(frozen=True)
class DeltaDisjunction:
    items: tuple[Formula, ...]

    def __post_init__(self):
        if not self.items:
            raise ValueError("a disjunctive goal needs at least one disjunct")


@dataclass(frozen=True)
class Absurdity:
    pass


Goal = SingleFormula | DeltaDisjunction | Absurdity


@dataclass(frozen=True)
class Axiom:
    schema: str
    bindings: Mapping[str, Formula] = field(default_factory=dict)


@dataclass(frozen=True)
class Premise:
    index: int        # 1-based


@dataclass(frozen=True)
class RuleApp:
    rule: str
    refs: tuple[int, ...]


@dataclass(frozen=True)
class N4Step:
    refs: tuple[int, ...]
    base: str = "n4"


@dataclass(frozen=True)
class Cite:
    script: str
    bindings: Mapping[str, Formula] = field(default_factory=dict)
    refs: tuple[int, ...] = ()


Justification = Axiom | Premise | RuleApp | N4Step | Cite


@dataclass(frozen=True)
class Step:
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class Derivation:
    system: str
    mode: Mode
    premises: tuple[Formula, ...]
    goal: Goal
    steps: tuple[Step, ...]
    name: str | None = None
    comments: tuple[str, ...] = ()

    @property
    def statement(self) -> Formula:
        if isinstance(self.goal, SingleFormula):
            return self.goal.formula
        if isinstance(self.goal, DeltaDisjunction):
            return disjunction(list(self.goal.items))
        return ABSURDITY


# ---------------------------------------------------------------- errors

class StepError(Exception):
    def __init__(self, step: int | None, message: str):
        where = f"step {step}: " if step is not None else ""
        super().__init__(where + message)
        self.step = step


class BadRef(StepError):
    pass


class SchemaMismatch(StepError):
    pass


class RuleShapeError(StepError):
    pass


class ModeViolation(StepError):
    pass


class N4StepRefuted(StepError):
    def __init__(self, step: int, message: str, countermodel=None):
        super().__init__(step, message)
        self.countermodel = countermodel


class GoalMismatch(StepError):
    pass


class UnboundMetavariable(StepError):
    pass


# ---------------------------------------------------------------- checking

def _match_all(pairs: Iterable[tuple[Formula, Formula]], sigma: dict) -> dict | None:
    for schema, f in pairs:
        sigma = match_schema(schema, f, sigma)
        if sigma is None:
            return None
    return sigma


def _expand_bindings(bindings: Mapping[str, Formula]) -> dict[str, Formula]:
    return {k: expand(v) for k, v in bindings.items()}


def _refs(step_no: int, refs: Sequence[int], formulas: list[Formula]) -> list[Formula]:
    out = []
    for r in refs:
        if not 1 <= r < step_no:
            raise BadRef(step_no, f"reference {r} does not point to an earlier step")
        out.append(formulas[r - 1])
    return out


def check_propositional(refs: Sequence[Formula], goal: Formula, base: str = "n4"):
    """Countermodel (or falsifying row) if ``refs`` do not entail ``goal`` after abstraction, else None."""
    abstracted, _ = abstract_conditionals([expand(f) for f in list(refs) + [goal]])
    premises, target = abstracted[:-1], abstracted[-1]
    if base == "cl":
        return decide_cl(premises, target)
    verdict = decide_il(premises, target) if base == "il" else decide_n4(premises, target)
    return verdict.model if isinstance(verdict, Refuted) else None


class Library:
    """Checked derivations available for citation, keyed ``system/name``."""

    def __init__(self):
        self._items: dict[str, Derivation] = {}

    def add(self, key: str, d: Derivation) -> None:
        self._items[key] = d

    def get(self, system: str, name: str) -> Derivation | None:
        key = name if "/" in name else f"{system}/{name}"
        return self._items.get(key)

    def __contains__(self, key: str) -> bool:
        return key in self._items

    def __iter__(self):
        return iter(self._items.items())

    def __len__(self) -> int:
        return len(self._items)


def check_derivation(d: Derivation, library: Library | None = None) -> None:
    """Raise a :class:`StepError` subclass on the first problem; return None if the derivation checks."""
    system = get_system(d.system)
    library = library or Library()
    formulas: list[Formula] = []
    premises = [expand(p) for p in d.premises]
    if d.mode is Mode.THEOREM and d.premises:
        raise ModeViolation(None, "a theorem derivation has no premises")
    for f in list(d.premises) + ([] if isinstance(d.goal, Absurdity) else [d.statement]):
        problem = language_violation(f, system.lang)
        if problem:
            raise LanguageError(problem)

    for no, step in enumerate(d.steps, start=1):
        problem = language_violation(step.formula, system.lang)
        if problem:
            raise StepError(no, problem)
        f = expand(step.formula)
        j = step.justification
        if isinstance(j, Premise):
            if d.mode is Mode.THEOREM:
                raise ModeViolation(no, "premises are not available in a theorem derivation")
            if not 1 <= j.index <= len(premises):
                raise BadRef(no, f"there is no premise {j.index}")
            if premises[j.index - 1] != f:
                raise SchemaMismatch(no, f"premise {j.index} is {to_text(d.premises[j.index - 1])}")
        elif isinstance(j, Axiom):
            if j.schema not in system.axioms:
                raise SchemaMismatch(no, f"{j.schema} is not an axiom of {system.name}")
            sigma = match_schema(expand(SCHEMAS[j.schema]), f, _expand_bindings(j.bindings))
            if sigma is None:
                raise SchemaMismatch(no, f"not an instance of {j.schema}")
        elif isinstance(j, RuleApp):
            if j.rule not in system.rules:
                raise RuleShapeError(no, f"{j.rule} is not a rule of {system.name}")
            if j.rule != "MP" and d.mode is Mode.CONSEQUENCE:
                raise ModeViolation(no, f"{j.rule} may not be used in a consequence derivation")
            _check_rule(no, RULES[j.rule], _refs(no, j.refs, formulas), f)
        elif isinstance(j, N4Step):
            if j.base not in system.bases:
                raise ModeViolation(no, f"{j.base} steps are not available in {system.name}")
            counter = check_propositional(_refs(no, j.refs, formulas), f, j.base)
            if counter is not None:
                raise N4StepRefuted(no, f"not a {j.base.upper()} consequence of steps "
                                        f"{', '.join(map(str, j.refs)) or '(none)'}", counter)
        elif isinstance(j, Cite):
            _check_cite(no, d, j, _refs(no, j.refs, formulas), f, library)
        else:
            raise StepError(no, f"unknown justification {j!r}")
        formulas.append(f)

    if not formulas:
        raise GoalMismatch(None, "empty derivation")
    if isinstance(d.goal, Absurdity) and not system.iota:
        raise GoalMismatch(None, f"{system.name} is not closed under absurdity")
    target = expand(d.statement)
    if formulas[-1] != target:
        raise GoalMismatch(len(formulas), f"last step is not the goal {to_text(d.statement)}")


def _check_rule(no: int, rule: Rule, refs: list[Formula], f: Formula) -> None:
    if len(refs) != len(rule.premises):
        raise RuleShapeError(no, f"{rule.name} takes {len(rule.premises)} premises, got {len(refs)}")
    conclusion = expand(rule.conclusion)
    prem = [expand(p) for p in rule.premises]
    orders = [refs] if rule.name != "MP" else [refs, refs[::-1]]
    for order in orders:
        sigma = _match_all([(conclusion, f)] + list(zip(prem, order)), {})
        if sigma is not None:
            return
    raise RuleShapeError(no, f"does not follow from the cited steps by {rule.name}")


def _check_cite(no: int, d: Derivation, j: Cite, refs: list[Formula], f: Formula,
                library: Library) -> None:
    cited = library.get(d.system, j.script)
    if cited is None:
        raise BadRef(no, f"no checked script {j.script} for {d.system}")
    if cited.system != d.system:
        raise BadRef(no, f"{j.script} is a {cited.system} derivation")
    if cited.premises and d.mode is Mode.CONSEQUENCE:
        raise ModeViolation(no, f"{j.script} is a derived rule; consequence derivations may only cite theorems")
    if isinstance(cited.goal, Absurdity):
        raise BadRef(no, f"{j.script} derives absurdity and cannot be cited")
    if len(refs) != len(cited.premises):
        raise RuleShapeError(no, f"{j.script} takes {len(cited.premises)} premises, got {len(refs)}")
    pairs = [(expand(cited.statement), f)] + [(expand(p), r) for p, r in zip(cited.premises, refs)]
    sigma = _match_all(pairs, _expand_bindings(j.bindings))
    if sigma is None:
        raise SchemaMismatch(no, f"not an instance of {j.script}")


# ---------------------------------------------------------------- file format

_STEP = re.compile(r"^\s*(\d+)\.\s*(.*?)\s*;\s*(\S.*?)\s*$")
_BINDINGS = re.compile(r"\{([^}]*)\}")


def _parse_formula(text: str) -> Formula:
    return parse(text, allow_meta=True)


def _parse_bindings(text: str) -> dict[str, Formula]:
    out: dict[str, Formula] = {}
    for part in filter(None, (x.strip() for x in text.split(","))):
        name, _, value = part.partition(":=")
        if not value:
            raise ValueError(f"binding {part!r} should read name := formula")
        out[name.strip()] = _parse_formula(value.strip())
    return out


def _parse_refs(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in re.split(r"[\s,]+", text.strip()) if x)


def parse_justification(text: str) -> Justification:
    bindings = {}
    m = _BINDINGS.search(text)
    if m:
        bindings = _parse_bindings(m.group(1))
        text = text[:m.start()] + " " + text[m.end():]
    head, _, rest = text.strip().partition(" ")
    rest = rest.strip()
    if head == "ax":
        return Axiom(rest, bindings)
    if head == "prem":
        return Premise(int(rest))
    if head == "rule":
        name, _, refs = rest.partition(" ")
        return RuleApp(name, _parse_refs(refs))
    if head in ("n4", "cl", "il"):
        return N4Step(_parse_refs(rest), head)
    if head == "cite":
        name, _, refs = rest.partition(" ")
        return Cite(name, bindings, _parse_refs(refs))
    raise ValueError(f"unknown justification {text!r}")


def _parse_goal(text: str) -> Goal:
    text = text.strip()
    if text.lower() == "absurdity":
        return Absurdity()
    if text.startswith("any "):
        return DeltaDisjunction(tuple(_parse_formula(x) for x in text[4:].split(";") if x.strip()))
    return SingleFormula(_parse_formula(text))


def parse_derivation(text: str, name: str | None = None) -> Derivation:
    header: dict[str, str] = {}
    steps: list[Step] = []
    comments: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line, hash_, comment = raw.partition("#")
        if hash_ and comment.strip():
            comments.append(comment.strip())
        line = line.strip()
        if not line:
            continue
        m = _STEP.match(line)
        if m:
            number = int(m.group(1))
            if number != len(steps) + 1:
                raise ValueError(f"line {lineno}: expected step {len(steps) + 1}, found {number}")
            steps.append(Step(_parse_formula(m.group(2)), parse_justification(m.group(3))))
            continue
        key, colon, value = line.partition(":")
        if not colon or key.strip().lower() not in ("system", "mode", "premises", "goal", "name"):
            raise ValueError(f"line {lineno}: cannot read {line!r}")
        header[key.strip().lower()] = value.strip()
    for key in ("system", "goal"):
        if key not in header:
            raise ValueError(f"missing header {key!r}")
    premises = tuple(_parse_formula(x) for x in header.get("premises", "").split(";") if x.strip())
    mode = Mode.from_name(header["mode"]) if "mode" in header else (
        Mode.DERIVED_RULE if premises else Mode.THEOREM)
    return Derivation(get_system(header["system"]).name, mode, premises,
                      _parse_goal(header["goal"]), tuple(steps), header.get("name", name),
                      tuple(comments))


def _bindings_text(b: Mapping[str, Formula]) -> str:
    return "{" + ", ".join(f"{k} := {to_text(v)}" for k, v in b.items()) + "}"


def justification_text(j: Justification) -> str:
    if isinstance(j, Axiom):
        return f"ax {j.schema}" + (f" {_bindings_text(j.bindings)}" if j.bindings else "")
    if isinstance(j, Premise):
        return f"prem {j.index}"
    if isinstance(j, RuleApp):
        return f"rule {j.rule} " + " ".join(map(str, j.refs))
    if isinstance(j, N4Step):
        return (j.base + " " + " ".join(map(str, j.refs))).strip()
    if isinstance(j, Cite):
        out = f"cite {j.script}"
        if j.bindings:
            out += f" {_bindings_text(j.bindings)}"
        return (out + " " + " ".join(map(str, j.refs))).strip()
    raise TypeError(j)


def format_derivation(d: Derivation) -> str:
    lines = []
    if d.name:
        lines.append(f"name: {d.name}")
    lines.append(f"system: {d.system}")
    lines.append(f"mode: {d.mode.value}")
    if d.premises:
        lines.append("premises: " + "; ".join(to_text(p) for p in d.premises))
    if isinstance(d.goal, Absurdity):
        lines.append("goal: absurdity")
    elif isinstance(d.goal, DeltaDisjunction):
        lines.append("goal: any " + "; ".join(to_text(x) for x in d.goal.items))
    else:
        lines.append(f"goal: {to_text(d.goal.formula)}")
    for no, s in enumerate(d.steps, start=1):
        lines.append(f"{no}. {to_text(s.formula)} ; {justification_text(s.justification)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- corpus

from importlib import resources  # noqa: E402

CORPUS_ORDER = {
    "N4CK": ("RCbox", "Nec", "RMbox", "RMnegBox", "RMdiam", "T1", "T2", "T3", "T4", "T5", "T6"),
    "CK": ("RCbox2", "RMbox", "T1", "A2", "A3", "RCbox", "Nec", "RMnegBox", "RMdiam",
           "T2", "T3", "T4", "T5", "T6"),
    "FSKd": ("rmnegBox", "rBox", "rnegBox", "t1", "t2", "t3"),
}

# CK scripts written out by hand; the others are rewritten from the N4CK ones
CK_NATIVE = ("RCbox2", "A2", "A3")


def read_script(system: str, name: str) -> Derivation:
    text = resources.files("n4ck").joinpath("scripts", system, f"{name}.prf").read_text()
    return parse_derivation(text, name)


def to_ck(d: Derivation) -> Derivation:
    """Re-justify an N4CK derivation in CK.

    A2, A3 and RCbox2 are not primitive in CK, so their uses become citations
    of the CK scripts that derive them; An1-An4 instances become classical
    steps.
    """
    steps = []
    for s in d.steps:
        j = s.justification
        if isinstance(j, RuleApp) and j.rule == "RCbox2":
            j = Cite("RCbox2", {}, j.refs)
        elif isinstance(j, Axiom) and j.schema in ("A2", "A3"):
            j = Cite(j.schema, j.bindings, ())
        elif isinstance(j, Axiom) and j.schema in ("An1", "An2", "An3", "An4"):
            j = N4Step((), "cl")
        steps.append(Step(s.formula, j))
    return Derivation("CK", d.mode, d.premises, d.goal, tuple(steps), d.name, d.comments)


def script_corpus() -> list[tuple[str, Derivation]]:
    """Every bundled script as (``system/name``, derivation), in dependency order."""
    out = []
    for system, names in CORPUS_ORDER.items():
        for name in names:
            if system == "CK" and name not in CK_NATIVE:
                d = to_ck(read_script("N4CK", name))
            else:
                d = read_script(system, name)
            out.append((f"{system}/{name}", d))
    return out


def check_corpus(corpus: Sequence[tuple[str, Derivation]] | None = None) -> Library:
    """Check scripts in order, each one citable by the later ones."""
    library = Library()
    for key, d in corpus if corpus is not None else script_corpus():
        check_derivation(d, library)
        library.add(key, d)
    return library


_LIBRARY: Library | None = None


def corpus_library() -> Library:
    """The checked corpus, built once per process."""
    global _LIBRARY
    if _LIBRARY is None:
        _LIBRARY = check_corpus()
    return _LIBRARY


# ---------------------------------------------------------------- soundness sampling

@dataclass(frozen=True)
class SoundnessFailure:
    kind: str                     # "axiom" or "rule"
    name: str
    trial: int
    formulas: tuple[Formula, ...]  # the instance, or premises followed by the conclusion
    model: object
    world: int


@dataclass
class SoundnessReport:
    system: str
    trials: int
    models: int
    checked: dict[str, int] = field(default_factory=dict)
    failures: list[SoundnessFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def failures_for(self, name: str) -> list[SoundnessFailure]:
        return [f for f in self.failures if f.name == name]


def _rule_premise_instance(rng: random.Random, rule: Rule, depth: int, letters, conns):
    """Bindings that make the rule's premises likely to hold: psi is a rewrite of phi."""
    from .search import random_formula
    from .syntax import And, Neg, Or

    phi = random_formula(rng, depth, letters, conns)
    choices = [phi, And(phi, phi), Or(phi, phi), Neg(Neg(phi)), And(phi, Or(phi, phi)),
               random_formula(rng, depth, letters, conns)]
    psi = rng.choice(choices)
    sigma = {"phi": phi, "psi": psi, "chi": random_formula(rng, depth, letters, conns)}
    return sigma


def soundness_sample(system: str, trials: int = 500, models: int = 200, seed: int = 0,
                     depth: int = 3, max_worlds: int = 4,
                     extra_axioms: Mapping[str, Formula] | None = None,
                     rule_trials: int | None = None) -> SoundnessReport:
    """Random axiom instances and rule applications checked on random models.

    Each of ``trials`` instances per axiom is evaluated on every model of a
    pool of ``models`` sampled models.  A rule application counts as a
    failure when its premises hold at every world of a model and its
    conclusion fails somewhere in that model.
    """
    from .search import CONNECTIVES, SearchBudget, random_formula, sample_model
    from .semantics import two_signed_masks
    from .syntax import p

    sys_ = get_system(system)
    if sys_.semantics is None:
        raise ValueError(f"{sys_.name} has no sampled semantics")
    logic = sys_.semantics
    rng = random.Random(seed)
    letters = [p(0), p(1), p(2)]
    conns = CONNECTIVES[logic]
    budget = SearchBudget(max_worlds=max_worlds, seed=seed)
    pool = [sample_model(logic, letters, budget, rng) for _ in range(models)]
    report = SoundnessReport(sys_.name, trials, models)

    def fails(m, f):
        bad = m.full & ~two_signed_masks(m, f)[0]
        return (bad & -bad).bit_length() - 1 if bad else None

    axioms = {name: SCHEMAS[name] for name in sys_.axioms}
    axioms.update(extra_axioms or {})
    for name, schema in axioms.items():
        schema = expand(schema)
        names = sorted(metas(schema))
        count = 0
        for t in range(trials):
            sigma = {n: random_formula(rng, depth, letters, conns) for n in names}
            inst = expand(apply_subst(schema, sigma))
            count += 1
            hit = None
            for m in pool:
                w = fails(m, inst)
                if w is not None:
                    hit = (m, w)
                    break
            if hit:
                report.failures.append(SoundnessFailure("axiom", name, t, (inst,), *hit))
                break
        report.checked[name] = count

    for name in sys_.rules:
        if name == "MP":
            continue
        rule = RULES[name]
        count = 0
        for t in range(rule_trials if rule_trials is not None else trials):
            sigma = _rule_premise_instance(rng, rule, depth, letters, conns)
            prem = [expand(apply_subst(x, sigma)) for x in rule.premises]
            concl = expand(apply_subst(rule.conclusion, sigma))
            count += 1
            for m in pool:
                if any(fails(m, x) is not None for x in prem):
                    continue
                w = fails(m, concl)
                if w is not None:
                    report.failures.append(SoundnessFailure("rule", name, t, (*prem, concl), m, w))
                    break
        report.checked[name] = count
    return report
