"""Hypothesis strategies over a small fixed signature."""

import random

from hypothesis import strategies as st

from corpus import random_flat_trs, random_shallow_trs
from shallow_un.kernel import available_backends
from shallow_un.terms import App, Var

SIG = {"f": 2, "g": 1, "a": 0, "b": 0, "c": 0}
VAR_NAMES = ["x", "y", "z"]

constants = st.sampled_from([App(n, ()) for n, k in SIG.items() if k == 0])
variables_ = st.sampled_from([Var(n) for n in VAR_NAMES])


def _extend(children):
    return st.one_of(
        st.builds(lambda a: App("g", (a,)), children),
        st.builds(lambda a, b: App("f", (a, b)), children, children),
    )


ground_terms = st.recursive(constants, _extend, max_leaves=8)
terms = st.recursive(st.one_of(constants, variables_), _extend, max_leaves=8)

flat_sides = st.one_of(
    constants,
    variables_,
    st.builds(lambda a: App("g", (a,)), st.one_of(constants, variables_)),
    st.builds(lambda a, b: App("f", (a, b)), st.one_of(constants, variables_), st.one_of(constants, variables_)),
)


@st.composite
def positioned(draw, source=terms):
    """A term together with one of its positions."""
    t = draw(source)
    pos = []
    s = t
    while isinstance(s, App) and s.args and draw(st.booleans()):
        k = draw(st.integers(0, len(s.args) - 1))
        pos.append(k)
        s = s.args[k]
    return t, tuple(pos)


@st.composite
def renamings(draw):
    """A bijection of VAR_NAMES onto fresh names."""
    targets = draw(st.permutations(["p", "q", "r"]))
    return dict(zip(VAR_NAMES, targets))


seeds = st.integers(min_value=0, max_value=10**6)
flat_systems = seeds.map(lambda s: random_flat_trs(random.Random(s)))
shallow_systems = seeds.map(lambda s: random_shallow_trs(random.Random(s)))

backends = st.sampled_from(sorted(available_backends()))
