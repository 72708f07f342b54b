r"""Formulas, the concrete grammar, printing, schemas and language membership.

Formulas are immutable trees.  Atoms are ``p<i>`` (plain) and ``q<i>``
(primed, only in the extended languages).  Metavariables (``phi``, ``psi``,
...) are a separate kind of leaf used by axiom schemas and by schematic proof
scripts.

Grammar, from tightest to loosest binding::

    ~  []  <>                 prefix
    /\                        left-assoc
    \/                        left-assoc
    ->  =>  []->  <>->        one level, right-assoc
    <->  <=>                  non-assoc

``<->``, ``=>`` and ``<=>`` are abbreviations and are expanded while parsing.
``<>->`` and ``<>`` are kept as their own constructors; :func:`expand` turns
them into ``~(a []-> ~b)`` and ``~[]~a`` where they are mere abbreviations.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ("_h",)

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"<{to_text(self)}>"


def _cached_hash(self) -> int:
    try:
        return self._h
    except AttributeError:
        h = hash((type(self).__name__,) + tuple(getattr(self, n) for n in self.__dataclass_fields__))
        object.__setattr__(self, "_h", h)
        return h


def _node(cls):
    cls = dataclass(frozen=True, slots=True, repr=False)(cls)
    cls.__hash__ = _cached_hash
    return cls


@_node
class Atom(Formula):
    index: int
    primed: bool = False

    @property
    def name(self) -> str:
        return f"{'q' if self.primed else 'p'}{self.index}"


@_node
class Meta(Formula):
    name: str


@_node
class Neg(Formula):
    sub: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class Imp(Formula):
    left: Formula
    right: Formula


@_node
class BoxTo(Formula):
    antecedent: Formula
    consequent: Formula


@_node
class DiamTo(Formula):
    antecedent: Formula
    consequent: Formula


@_node
class Box(Formula):
    sub: Formula


@_node
class Diamond(Formula):
    sub: Formula


BINARY = (And, Or, Imp, BoxTo, DiamTo)
UNARY = (Neg, Box, Diamond)
MODAL = (BoxTo, DiamTo, Box, Diamond)


def p(i: int) -> Atom:
    return Atom(i)


def q(i: int) -> Atom:
    return Atom(i, True)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Atom, Meta)):
        return ()
    if isinstance(f, UNARY):
        return (f.sub,)
    a, b = _pair(f)
    return (a, b)


def _pair(f) -> tuple[Formula, Formula]:
    if isinstance(f, (BoxTo, DiamTo)):
        return f.antecedent, f.consequent
    return f.left, f.right


def rebuild(f: Formula, kids: tuple[Formula, ...]) -> Formula:
    """Same connective as ``f`` with new children."""
    return type(f)(*kids) if kids else f


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal, duplicates included."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def depth(f: Formula) -> int:
    kids = children(f)
    return 0 if not kids else 1 + max(depth(k) for k in kids)


def atoms(f: Formula) -> set[Atom]:
    return {g for g in subformulas(f) if isinstance(g, Atom)}


def metas(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Meta)}


def map_bottom_up(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    kids = children(f)
    if kids:
        f = rebuild(f, tuple(map_bottom_up(k, fn) for k in kids))
    return fn(f)


# ---------------------------------------------------------------- sugar

def iff(a: Formula, b: Formula) -> Formula:
    return And(Imp(a, b), Imp(b, a))


def strong_imp(a: Formula, b: Formula) -> Formula:
    return And(Imp(a, b), Imp(Neg(b), Neg(a)))


def strong_iff(a: Formula, b: Formula) -> Formula:
    return And(strong_imp(a, b), strong_imp(b, a))


def diamto_expanded(a: Formula, b: Formula) -> Formula:
    return Neg(BoxTo(a, Neg(b)))


def diamond_expanded(a: Formula) -> Formula:
    return Neg(Box(Neg(a)))


def sugar(name: str, *args: Formula) -> Formula:
    table = {
        "Iff": (2, iff),
        "StrongImp": (2, strong_imp),
        "StrongIff": (2, strong_iff),
        "DiamTo": (2, diamto_expanded),
        "Diamond": (1, diamond_expanded),
    }
    arity, build = table[name]
    if len(args) != arity:
        raise TypeError(f"{name} takes {arity} arguments, got {len(args)}")
    return build(*args)


def expand(f: Formula) -> Formula:
    """Replace every ``<>->`` and ``<>`` node by its defining abbreviation."""
    def step(g: Formula) -> Formula:
        if isinstance(g, DiamTo):
            return diamto_expanded(g.antecedent, g.consequent)
        if isinstance(g, Diamond):
            return diamond_expanded(g.sub)
        return g
    return map_bottom_up(f, step)


def disjunction(items: list[Formula]) -> Formula:
    """Right-nested disjunction ``t1 \\/ (t2 \\/ (... \\/ tn))``."""
    if not items:
        raise ValueError("empty disjunction")
    out = items[-1]
    for item in reversed(items[:-1]):
        out = Or(item, out)
    return out


ABSURDITY = And(p(1), Neg(p(1)))


# ---------------------------------------------------------------- languages

class Lang(enum.Enum):
    """Languages: allowed connectives plus whether q-atoms are admitted."""

    L = ("L", False, {"neg", "and", "or", "imp"})
    LBoxto = ("LBoxto", False, {"neg", "and", "or", "imp", "boxto"})
    LBoxtoDiamto = ("LBoxtoDiamto", False, {"neg", "and", "or", "imp", "boxto", "diamto"})
    LeBoxtoDiamto = ("LeBoxtoDiamto", True, {"and", "or", "imp", "boxto", "diamto"})
    LBox = ("LBox", False, {"neg", "and", "or", "imp", "box"})
    LBoxDiamond = ("LBoxDiamond", False, {"neg", "and", "or", "imp", "box", "diamond"})
    LeBoxDiamond = ("LeBoxDiamond", True, {"and", "or", "imp", "box", "diamond"})
    LePlus = ("LePlus", True, {"and", "or", "imp"})

    def __init__(self, label: str, extended: bool, connectives: set[str]):
        self.label = label
        self.extended = extended
        self.connectives = frozenset(connectives)

    @property
    def positive(self) -> bool:
        return "neg" not in self.connectives

    @classmethod
    def from_name(cls, name: str) -> "Lang":
        for lang in cls:
            if lang.label.lower() == name.lower():
                return lang
        raise ValueError(f"unknown language {name!r}")


_TAGS = {Neg: "neg", And: "and", Or: "or", Imp: "imp", BoxTo: "boxto",
         DiamTo: "diamto", Box: "box", Diamond: "diamond"}

# connectives that may appear as abbreviations of connectives the language has
_ABBREVIATES = {"diamto": {"neg", "boxto"}, "diamond": {"neg", "box"}}


class LanguageError(ValueError):
    pass


class FormulaSyntaxError(SyntaxError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def language_violation(f: Formula, lang: Lang) -> str | None:
    """Describe the first symbol of ``f`` outside ``lang``, or None."""
    for g in subformulas(f):
        if isinstance(g, Atom):
            if g.primed and not lang.extended:
                return f"atom {g.name} is not in {lang.label}"
        elif isinstance(g, Meta):
            continue
        else:
            tag = _TAGS[type(g)]
            if tag in lang.connectives:
                continue
            if tag in _ABBREVIATES and _ABBREVIATES[tag] <= lang.connectives:
                continue
            return f"connective {tag} is not in {lang.label}"
    return None


def well_formed_in(f: Formula, lang: Lang) -> bool:
    return language_violation(f, lang) is None


def check_language(f: Formula, lang: Lang) -> Formula:
    problem = language_violation(f, lang)
    if problem:
        raise LanguageError(problem)
    return f


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"""
    \s*(?:
      (?P<atom>[pq]\d+)(?![A-Za-z0-9_])
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<op>\[\]->|<>->|<->|<=>|->|=>|\[\]|<>|/\\|\\/|~|\(|\))
    )""", re.VERBOSE)

_ARROWS = {"->": Imp, "[]->": BoxTo, "<>->": DiamTo, "=>": strong_imp}
_IFFS = {"<->": iff, "<=>": strong_iff}
_PREFIX = {"~": Neg, "[]": Box, "<>": Diamond}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, allow_meta: bool):
        self.tokens = _tokenize(text)
        self.i = 0
        self.allow_meta = allow_meta

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff_level()
        kind, text, pos = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(f"unexpected token {text!r}", pos)
        return f

    def iff_level(self) -> Formula:
        left = self.arrow_level()
        _, text, _ = self.peek()
        if text in _IFFS:
            self.take()
            right = self.arrow_level()
            _, nxt, pos = self.peek()
            if nxt in _IFFS:
                raise FormulaSyntaxError(f"{nxt!r} is non-associative; add parentheses", pos)
            return _IFFS[text](left, right)
        return left

    def arrow_level(self) -> Formula:
        left = self.or_level()
        _, text, _ = self.peek()
        if text in _ARROWS:
            self.take()
            return _ARROWS[text](left, self.arrow_level())
        return left

    def or_level(self) -> Formula:
        left = self.and_level()
        while self.peek()[1] == "\\/":
            self.take()
            left = Or(left, self.and_level())
        return left

    def and_level(self) -> Formula:
        left = self.prefix_level()
        while self.peek()[1] == "/\\":
            self.take()
            left = And(left, self.prefix_level())
        return left

    def prefix_level(self) -> Formula:
        kind, text, pos = self.take()
        if text in _PREFIX and kind == "op":
            return _PREFIX[text](self.prefix_level())
        if kind == "atom":
            return Atom(int(text[1:]), text[0] == "q")
        if kind == "ident":
            if not self.allow_meta:
                raise FormulaSyntaxError(f"unknown identifier {text!r}", pos)
            return Meta(text)
        if text == "(":
            f = self.iff_level()
            kind2, text2, pos2 = self.take()
            if text2 != ")":
                raise FormulaSyntaxError(f"expected ')' but found {text2 or 'end of input'!r}", pos2)
            return f
        raise FormulaSyntaxError(f"unexpected {'end of input' if kind == 'end' else repr(text)}", pos)


def parse(text: str, lang: Lang | None = None, allow_meta: bool = False) -> Formula:
    """Parse ``text``; when ``lang`` is given, reject symbols outside it."""
    f = _Parser(text, allow_meta).parse()
    if lang is not None:
        check_language(f, lang)
    return f


def parse_schema(text: str) -> Formula:
    return parse(text, allow_meta=True)


# ---------------------------------------------------------------- printing

_ASCII = {"neg": "~", "box": "[]", "diamond": "<>", "and": "/\\", "or": "\\/",
          "imp": "->", "boxto": "[]->", "diamto": "<>->", "simp": "=>",
          "iff": "<->", "siff": "<=>"}
_UNICODE = {"neg": "∼", "box": "□", "diamond": "◇", "and": "∧", "or": "∨",
            "imp": "→", "boxto": "⊡", "diamto": "◇→", "simp": "⇒",
            "iff": "↔", "siff": "⇔"}
_GREEK = {"phi": "φ", "psi": "ψ", "chi": "χ", "theta": "θ", "xi": "ξ", "tau": "τ"}

# precedence levels: larger binds tighter
_LEVEL = {"iff": 1, "siff": 1, "imp": 2, "boxto": 2, "diamto": 2, "simp": 2,
          "or": 3, "and": 4}
_RIGHT_ASSOC = {2}
_LEFT_ASSOC = {3, 4}


def _view(f: Formula, abbreviate: bool) -> tuple[str, tuple[Formula, ...]]:
    """Top connective tag and operands, optionally folding abbreviations."""
    if abbreviate and isinstance(f, And):
        a, b = f.left, f.right
        if (isinstance(a, And) and isinstance(b, And) and _is_strong_imp(a)
                and _is_strong_imp(b) and a.left.left == b.left.right
                and a.left.right == b.left.left):
            return "siff", (a.left.left, a.left.right)
        if (isinstance(a, Imp) and isinstance(b, Imp) and a.left == b.right
                and a.right == b.left):
            return "iff", (a.left, a.right)
        if _is_strong_imp(f):
            return "simp", (a.left, a.right)
    if isinstance(f, (Atom, Meta)):
        return "leaf", ()
    return _TAGS[type(f)], children(f)


def _is_strong_imp(f: Formula) -> bool:
    return (isinstance(f, And) and isinstance(f.left, Imp) and isinstance(f.right, Imp)
            and f.right.left == Neg(f.left.right) and f.right.right == Neg(f.left.left))


def to_text(f: Formula, unicode: bool = False, abbreviate: bool = False) -> str:
    """Render ``f`` so that :func:`parse` reads back the same tree.

    A binary operand that is itself binary is parenthesized unless it sits on
    the associative side of an operator of the same level, so ``p0 -> p1 -> p2``
    stays bare while ``p0 []-> (p1 /\\ p2)`` keeps its parentheses.
    """
    sym = _UNICODE if unicode else _ASCII

    def leaf(g: Formula) -> str:
        if isinstance(g, Atom):
            return g.name
        return _GREEK.get(g.name, g.name) if unicode else g.name

    def render(g: Formula) -> str:
        tag, ops = _view(g, abbreviate)
        if tag == "leaf":
            return leaf(g)
        if len(ops) == 1:
            inner = ops[0]
            itag, _ = _view(inner, abbreviate)
            body = render(inner)
            if itag in _LEVEL:
                body = f"({body})"
            return sym[tag] + body
        level = _LEVEL[tag]
        parts = []
        for side, operand in (("left", ops[0]), ("right", ops[1])):
            otag, _ = _view(operand, abbreviate)
            text = render(operand)
            if otag in _LEVEL:
                olevel = _LEVEL[otag]
                bare = olevel == level and (
                    (side == "right" and level in _RIGHT_ASSOC)
                    or (side == "left" and level in _LEFT_ASSOC and otag == tag))
                if not bare:
                    text = f"({text})"
            parts.append(text)
        return f"{parts[0]} {sym[tag]} {parts[1]}"

    return render(f)


# ---------------------------------------------------------------- schemas

Substitution = dict[str, Formula]


class MissingBinding(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"no binding for metavariable {self.name}"


def match_schema(schema: Formula, f: Formula,
                 bindings: Mapping[str, Formula] | None = None) -> Substitution | None:
    """Most general substitution turning ``schema`` into ``f`` (None if none).

    Metavariables of ``f`` itself are treated as opaque leaves.
    """
    sigma: Substitution = dict(bindings or {})
    stack = [(schema, f)]
    while stack:
        s, g = stack.pop()
        if isinstance(s, Meta):
            bound = sigma.get(s.name)
            if bound is None:
                sigma[s.name] = g
            elif bound != g:
                return None
            continue
        if type(s) is not type(g):
            return None
        if isinstance(s, Atom):
            if s != g:
                return None
            continue
        stack.extend(zip(children(s), children(g)))
    return sigma


def apply_subst(schema: Formula, sigma: Mapping[str, Formula], partial: bool = False) -> Formula:
    """Replace metavariables by their bindings.

    With ``partial`` set, unbound metavariables are left in place instead of
    raising :class:`MissingBinding`.
    """
    def go(s: Formula) -> Formula:
        if isinstance(s, Meta):
            if s.name in sigma:
                return sigma[s.name]
            if partial:
                return s
            raise MissingBinding(s.name)
        kids = children(s)
        if not kids:
            return s
        new = tuple(go(k) for k in kids)
        if all(a is b for a, b in zip(new, kids)):
            return s
        return rebuild(s, new)
    return go(schema)


# ---------------------------------------------------------------- antecedents

def antecedents(f: Formula) -> list[Formula]:
    """Distinct antecedents of ``[]->``/``<>->`` nodes, innermost hosts first.

    Ordered by the size of the conditional they head, ties broken by
    left-to-right position; an antecedent shared by several conditionals is
    placed by its smallest host.  Every conditional inside an antecedent is
    smaller than that antecedent's host, so the list is safe to process in
    order when building relation tables.
    """
    hosts = []
    for pos, g in enumerate(subformulas(f)):
        if isinstance(g, (BoxTo, DiamTo)):
            hosts.append((size(g), pos, g.antecedent))
    hosts.sort(key=lambda t: (t[0], t[1]))
    seen: set[Formula] = set()
    out = []
    for _, _, a in hosts:
        if a not in seen:
            seen.add(a)
            out.append(a)
    return out
