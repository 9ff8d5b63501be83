from pathlib import Path

import pytest
from hypothesis import given, settings

from shallow_un.closure import (
    EquationSet,
    closure_of,
    equation_key,
    expand_step,
    format_closure,
    saturate,
    to_equations,
)
from shallow_un.errors import NotFlat, UnknownEquation
from shallow_un.proof import replay, rules_resolver
from shallow_un.syntax import parse_trs
from shallow_un.terms import App, Var, is_flat
from shallow_un.trs import Trs
from strategies import flat_systems

DATA = Path(__file__).parent / "data"
x, y = Var("x"), Var("y")
a, b, c = App("a"), App("b"), App("c")


def f(*args):
    return App("f", args)


def g(*args):
    return App("g", args)


def keys_of(pairs):
    return {equation_key(l, r) for l, r in pairs if l != r}


def test_rules_become_canonical_equations():
    trs = Trs.build([(f(y, x), x), (g(a, y), c)], declared_vars=["x", "y"])
    eqs = to_equations(trs)
    assert [str(e) for e in eqs] == ["f(v0,v1) = v1", "g(a,v0) = c"]
    assert [e.id for e in eqs] == [0, 1]


def test_duplicate_rules_share_one_equation():
    trs = Trs.build([(f(x, a), b), (b, f(y, a))], declared_vars=["x", "y"])
    assert len(to_equations(trs)) == 1


def test_worked_example_closure():
    trs = parse_trs((DATA / "ex21.trs").read_text())
    eqs = closure_of(trs)
    expected = keys_of([(r.lhs, r.rhs) for r in trs.rules] + [(c, g(a, x))])
    assert eqs.keys() - {equation_key(e.lhs, e.rhs) for e in eqs if e.trivial} == expected


def test_rule_two_substitutes_the_variable_side():
    # x = d and y = r with y a variable: d = r{y := x}
    trs = Trs.build([(a, b), (g(x), x)], declared_vars=["x"])
    eqs = closure_of(trs)
    assert (b, g(a)) in eqs


def test_rule_three_rewrites_each_constant_occurrence():
    trs = Trs.build([(f(a, a), c), (a, b)])
    eqs = closure_of(trs)
    assert (f(b, a), c) in eqs
    assert (f(a, b), c) in eqs
    assert (f(b, b), c) in eqs


def test_non_flat_input_is_rejected():
    with pytest.raises(NotFlat):
        closure_of(Trs.build([(f(g(a), x), x)], declared_vars=["x"]))


def test_format_lists_provenance():
    text = format_closure(closure_of(parse_trs((DATA / "ex21.trs").read_text())))
    assert "f(v0,v0) = c  # rule 0" in text
    assert "g(a,v0) = c  # (1) from 1,0" in text


def test_expand_step_rejects_foreign_equations():
    trs = Trs.build([(a, b)])
    other = closure_of(Trs.build([(b, c)]))
    eq = next(iter(other))
    eq.id = 99
    with pytest.raises(UnknownEquation):
        expand_step(eq, {}, (), closure_of(trs), trs)


# -- properties -----------------------------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(flat_systems)
def test_closure_is_flat(system):
    trs, _, _ = system
    for e in closure_of(trs):
        assert is_flat(e.lhs) and is_flat(e.rhs)


@settings(max_examples=80, deadline=None)
@given(flat_systems)
def test_every_closure_equation_lowers_to_rule_steps(system):
    trs, _, _ = system
    eqs = closure_of(trs)
    resolve = rules_resolver(trs.rules)
    for e in eqs:
        steps = expand_step(e, {}, (), eqs, trs)
        assert replay(e.lhs, steps, resolve)[-1] == e.rhs


@settings(max_examples=60, deadline=None)
@given(flat_systems)
def test_saturation_is_idempotent(system):
    trs, _, _ = system
    once = closure_of(trs)
    assert saturate(once).keys() == once.keys()


@settings(max_examples=60, deadline=None)
@given(flat_systems)
def test_saturation_is_monotone(system):
    trs, _, _ = system
    base = to_equations(trs)
    closed = closure_of(trs)
    assert {e.key() for e in base if not e.trivial} <= closed.keys()


def test_equation_set_ignores_renaming_and_orientation():
    eqs = EquationSet(to_equations(Trs.build([(f(x, a), x)], declared_vars=["x"])))
    assert (Var("q"), f(Var("q"), a)) in eqs
    assert eqs.find(f(y, a), y) is not None
