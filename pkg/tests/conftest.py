import random

import pytest
from hypothesis import strategies as st

from n4ck.syntax import And, Atom, Box, BoxTo, DiamTo, Diamond, Imp, Neg, Or, p

LETTERS = [p(0), p(1), p(2)]

_UNARY = {"neg": Neg, "box": Box, "diamond": Diamond}
_BINARY = {"and": And, "or": Or, "imp": Imp, "boxto": BoxTo, "diamto": DiamTo}


def formulas(connectives=("neg", "and", "or", "imp"), letters=LETTERS, max_leaves=12, primed=False):
    """Hypothesis strategy for formulas over the given connectives."""
    atoms = list(letters) + ([Atom(a.index, True) for a in letters] if primed else [])
    base = st.sampled_from(atoms)

    def extend(children):
        options = []
        for name in connectives:
            if name in _UNARY:
                options.append(children.map(_UNARY[name]))
            else:
                options.append(st.tuples(children, children).map(lambda ab, c=_BINARY[name]: c(*ab)))
        return st.one_of(options)

    return st.recursive(base, extend, max_leaves=max_leaves)


N4_FORMULAS = formulas()
COND_FORMULAS = formulas(("neg", "and", "or", "imp", "boxto", "diamto"))
MODAL_FORMULAS = formulas(("neg", "and", "or", "imp", "box", "diamond"))


@pytest.fixture
def rng():
    return random.Random(1234)
