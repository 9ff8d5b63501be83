import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from shallow_un.errors import InvalidPosition
from shallow_un.terms import (
    App,
    Symbol,
    Var,
    apply_subst,
    canonical_pair,
    canonical_rename,
    is_flat,
    is_linear,
    is_shallow,
    match_term,
    positions,
    rename,
    replace_at,
    subterm_at,
    unify,
    variables,
)
from strategies import flat_sides, positioned, renamings, terms

x, y, z = Var("x"), Var("y"), Var("z")
a, b, c = App("a"), App("b"), App("c")


def f(*args):
    return App("f", args)


def g(t):
    return App("g", (t,))


def test_size_and_height():
    t = f(g(a), x)
    assert (t.size, t.height) == (4, 2)
    assert (a.size, a.height) == (1, 0)
    assert (x.size, x.height) == (1, 0)


def test_printing_and_equality():
    assert str(f(g(a), x)) == "f(g(a),x)"
    assert f(a, x) == f(App("a"), Var("x"))
    assert hash(f(a, x)) == hash(f(App("a"), Var("x")))
    assert Var("a") != App("a")


def test_symbol_validation():
    assert str(Symbol("f", 2)) == "f/2"
    with pytest.raises(ValueError):
        Symbol("f", -1)
    with pytest.raises(ValueError):
        Symbol("", 0)


def test_positions_are_preorder_and_zero_based():
    assert list(positions(f(g(a), x))) == [(), (0,), (0, 0), (1,)]


def test_subterm_at_rejects_bad_positions():
    with pytest.raises(InvalidPosition):
        subterm_at(f(a, b), (2,))
    with pytest.raises(InvalidPosition):
        subterm_at(x, (0,))


def test_match_respects_repeated_variables():
    assert match_term(f(x, x), f(a, a)) == {"x": a}
    assert match_term(f(x, x), f(a, b)) is None
    assert match_term(f(x, a), f(g(b), a)) == {"x": g(b)}
    assert match_term(g(x), a) is None


def test_unify_basic_and_occurs_check():
    assert unify(f(x, a), f(b, y)) == {"x": b, "y": a}
    assert unify(x, g(x)) is None
    assert unify(f(x, x), f(a, b)) is None


def test_unify_of_flat_terms_stays_flat():
    sigma = unify(f(x, x), f(y, a))
    assert sigma is not None
    assert all(v.height == 0 for v in sigma.values())


def test_classification():
    assert is_flat(f(x, a)) and not is_flat(f(g(a), x))
    assert is_shallow(f(g(a), x)) and not is_shallow(f(g(x), a))
    assert is_linear(f(x, y)) and not is_linear(f(x, x))


def test_canonical_rename_numbers_by_first_occurrence():
    assert canonical_rename(f(y, f(x, y))) == f(Var("v0"), f(Var("v1"), Var("v0")))
    assert canonical_pair(g(y), f(x, y)) == (g(Var("v0")), f(Var("v1"), Var("v0")))


# -- properties -----------------------------------------------------------------------


@given(positioned())
def test_replace_with_own_subterm_is_identity(tp):
    t, p = tp
    assert replace_at(t, p, subterm_at(t, p)) == t


@given(positioned(), terms)
def test_replace_then_read_back(tp, s):
    t, p = tp
    assert subterm_at(replace_at(t, p, s), p) == s


@given(terms, terms)
def test_match_success_reproduces_subject(pattern, subject):
    sigma = match_term(pattern, subject)
    if sigma is not None:
        assert apply_subst(pattern, sigma) == subject


@given(terms, st.dictionaries(st.sampled_from(["x", "y", "z"]), terms, max_size=3))
def test_match_finds_instances(pattern, sigma):
    inst = apply_subst(pattern, sigma)
    found = match_term(pattern, inst)
    assert found is not None
    assert apply_subst(pattern, found) == inst


@given(terms, terms)
def test_unifier_equalises(s, t):
    sigma = unify(s, t)
    if sigma is not None:
        assert apply_subst(s, sigma) == apply_subst(t, sigma)


@given(flat_sides, flat_sides)
def test_flat_unifiers_bind_to_variables_or_constants(s, t):
    # a bare variable unifies with anything, so only non-variable sides qualify
    assume(isinstance(s, App) and isinstance(t, App))
    sigma = unify(s, t)
    if sigma is not None:
        assert all(v.height == 0 for v in sigma.values())


@given(terms)
def test_size_and_height_recurrences(t):
    if isinstance(t, Var) or not t.args:
        assert (t.size, t.height) == (1, 0)
    else:
        assert t.size == 1 + sum(s.size for s in t.args)
        assert t.height == 1 + max(s.height for s in t.args)


@given(terms)
def test_canonical_rename_is_idempotent(t):
    once = canonical_rename(t)
    assert canonical_rename(once) == once


@given(terms, renamings())
def test_canonical_rename_ignores_prior_renaming(t, mapping):
    assert canonical_rename(rename(t, mapping)) == canonical_rename(t)


@given(terms)
def test_variables_listed_once_in_order(t):
    vs = variables(t)
    assert len(vs) == len(set(vs))
