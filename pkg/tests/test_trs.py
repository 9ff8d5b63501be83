import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_flat_trs, random_ground, random_term
from oracles import brute_normal_forms
from shallow_un.errors import CapExceeded, NotFlat, VariableAsLhs
from shallow_un.proof import apply_step, rules_resolver
from shallow_un.terms import App, Var, match_term, subterms, unify
from shallow_un.trs import (
    NormalFormsBySize,
    Rule,
    Trs,
    enumerate_normal_forms,
    extend_signature,
    is_normal_form,
    one_step_successors,
    pattern_wrt,
    rule_applies_at_root,
    rule_pattern,
)
from strategies import flat_systems

x, y = Var("x"), Var("y")
a, b, c = App("a"), App("b"), App("c")


def f(*args):
    return App("f", args)


def g(t):
    return App("g", (t,))


def test_rule_rejects_variable_lhs():
    with pytest.raises(VariableAsLhs):
        Rule(0, x, a)


def test_rule_classification():
    r = Rule(0, f(x, x), g(a))
    assert r.flat and r.shallow and not r.linear and not r.collapsing
    assert Rule(1, g(x), x).collapsing


def test_patterns():
    r = Rule(0, App("h", (x, a, x, y)), a)
    assert rule_pattern(r) == {(0, 2)}
    assert pattern_wrt(r, App("h", (b, a, b, c))) == {(0, 2)}
    assert pattern_wrt(r, App("h", (b, a, c, c))) == frozenset()
    assert pattern_wrt(r, g(a)) is None


def test_applicability_by_pattern():
    r = Rule(0, f(x, x), c)
    assert rule_applies_at_root(r, f(g(a), g(a)))
    assert not rule_applies_at_root(r, f(a, b))
    assert rule_applies_at_root(Rule(1, a, b), a)
    with pytest.raises(NotFlat):
        rule_applies_at_root(Rule(2, f(g(a), x), x), f(g(a), b))


def test_signature_and_constants():
    trs = Trs.build([(f(x, a), b), (g(c), c)], declared_vars=["x"])
    assert trs.signature == {"a": 0, "b": 0, "c": 0, "f": 2, "g": 1}
    assert trs.constants == ["a", "b", "c"]
    assert trs.max_arity == 2


def test_extend_signature_adds_three_alpha_constants():
    trs = Trs.build([(f(x, a), b)], declared_vars=["x"])
    ext = extend_signature(trs)
    assert ext.fresh == ("_k0", "_k1", "_k2", "_k3", "_k4", "_k5")
    assert ext.constants == trs.constants
    assert extend_signature(Trs.build([(a, b)])).fresh == ("_k0", "_k1", "_k2")


def test_extend_signature_avoids_clashes():
    trs = Trs.build([(App("_k0"), b)])
    assert "_k0" not in extend_signature(trs).fresh


def test_enumeration_order_and_content():
    trs = Trs.build([(f(x, x), a), (g(a), b)], declared_vars=["x"])
    nfs = enumerate_normal_forms(trs, 1)
    assert nfs[:2] == [a, b]
    assert set(nfs) == {a, b, g(b), f(a, b), f(b, a)}


def test_enumeration_cap_is_an_error():
    trs = Trs.build([(f(x, a), a)], declared_vars=["x"], fresh=["k0", "k1", "k2"])
    with pytest.raises(CapExceeded):
        enumerate_normal_forms(trs, 3, cap=50)


def test_use_declared_symbols():
    trs = Trs.build([(a, b)], signature={"h": 1})
    assert enumerate_normal_forms(trs, 1) == [b]
    assert enumerate_normal_forms(trs, 1, use_declared=True) == [b, App("h", (b,))]


def test_successors_forward_and_symmetric():
    trs = Trs.build([(f(x, a), g(x)), (g(b), c)], declared_vars=["x"])
    fwd = [t for t, _ in one_step_successors(f(g(b), a), trs)]
    assert fwd == [g(g(b)), f(c, a)]
    back = [t for t, _ in one_step_successors(c, trs, "symmetric")]
    assert back == [g(b)]


def test_successors_draw_extra_variables_from_pool():
    trs = Trs.build([(f(x, y), a)], declared_vars=["x", "y"])
    assert one_step_successors(a, trs, "symmetric") == []
    got = {t for t, _ in one_step_successors(a, trs, "symmetric", pool=[a, b])}
    assert got == {f(a, a), f(a, b), f(b, a), f(b, b)}


# -- properties -----------------------------------------------------------------------


@settings(max_examples=150)
@given(flat_systems, st.integers(0, 10**6))
def test_applicability_equals_matching(system, seed):
    trs, funs, consts = system
    rng = random.Random(seed)
    t = random_term(rng, funs, consts, 2)
    for r in trs.rules:
        assert rule_applies_at_root(r, t) == (match_term(r.lhs, t) is not None)


@settings(max_examples=60, deadline=None)
@given(flat_systems)
def test_enumeration_matches_brute_force(system):
    trs, _, _ = system
    for h in (0, 1, 2):
        assert set(enumerate_normal_forms(trs, h)) == brute_normal_forms(trs, h)


@settings(max_examples=60, deadline=None)
@given(flat_systems)
def test_enumerated_forms_are_subterm_closed(system):
    trs, _, _ = system
    nfs = set(enumerate_normal_forms(trs, 2))
    for t in nfs:
        for _, s in subterms(t):
            assert s in nfs


@settings(max_examples=60, deadline=None)
@given(flat_systems)
def test_size_layers_cover_the_height_enumeration(system):
    trs, _, _ = system
    ext = extend_signature(trs)
    by_height = enumerate_normal_forms(ext, 2)
    nfs = NormalFormsBySize(ext, 2)
    layered = [t for n in range(1, nfs.max_size + 1) for t in nfs.layer(n)]
    assert sorted(map(str, layered)) == sorted(map(str, by_height))
    assert nfs.count == len(by_height)


@settings(max_examples=100, deadline=None)
@given(flat_systems, st.integers(0, 10**6))
def test_replacing_arguments_by_fresh_variable_forms_keeps_normality(system, seed):
    trs, funs, consts = system
    rng = random.Random(seed)
    nfs = [t for t in enumerate_normal_forms(trs, 2) if t.args]
    if not nfs:
        return
    m = rng.choice(nfs)
    chosen = [i for i in range(len(m.args)) if rng.random() < 0.6]
    # equal arguments may share a replacement; distinct ones never do
    fresh_for = {}
    args = list(m.args)
    for k, i in enumerate(chosen):
        s = m.args[i]
        if s in fresh_for and rng.random() < 0.5:
            args[i] = fresh_for[s]
            continue
        w = Var(f"w{k}")
        candidate = w
        for name, arity in funs:
            wrapped = App(name, (w,) * arity)
            if rng.random() < 0.3 and is_normal_form(wrapped, trs):
                candidate = wrapped
                break
        fresh_for.setdefault(s, candidate)
        args[i] = candidate
    assert is_normal_form(App(m.fn, tuple(args)), trs)


@settings(max_examples=100, deadline=None)
@given(flat_systems, st.integers(0, 10**6))
def test_forward_successor_equals_input_only_via_unifiable_rule(system, seed):
    trs, funs, consts = system
    t = random_ground(random.Random(seed), funs, consts, 3)
    succ = one_step_successors(t, trs)
    resolve = rules_resolver(trs.rules)
    for new, step in succ:
        assert apply_step(t, step, resolve) == new
        if new == t:
            # only a rule whose sides have a common instance can reproduce its input
            r = trs.by_id[step.eq]
            assert unify(r.lhs, r.rhs) is not None


def test_successor_identity_needs_an_identity_rule():
    trs = Trs.build([(g(x), g(x)), (a, b)], declared_vars=["x"])
    assert any(t == g(a) for t, _ in one_step_successors(g(a), trs))
    trs2 = Trs.build([(a, b)])
    assert all(t != a for t, _ in one_step_successors(a, trs2))


def test_random_flat_corpus_is_flat():
    for seed in range(50):
        trs, _, _ = random_flat_trs(random.Random(seed))
        assert trs.is_flat()
