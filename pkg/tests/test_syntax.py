import pytest
from hypothesis import given, settings

from shallow_un.errors import ArityConflict, ParseError, VariableAsLhs
from shallow_un.syntax import parse_term, parse_trs, print_trs
from shallow_un.terms import App, Var
from strategies import flat_systems, shallow_systems


def test_parse_term_with_declared_variables():
    t = parse_term("f(x, g(a))", ["x"])
    assert t == App("f", (Var("x"), App("g", (App("a"),))))
    assert parse_term("x") == App("x")


def test_rule_prefix_comments_and_unicode_arrow():
    trs = parse_trs("vars x\nrule: f(x) -> a   # comment\ng(x) → x\n")
    assert [str(r) for r in trs.rules] == ["f(x) -> a", "g(x) -> x"]


def test_digit_and_empty_word_identifiers():
    trs = parse_trs("f(∅) -> 0\nh_1_0(∅) -> 1\n")
    assert trs.constants == ["0", "1", "∅"]


def test_fresh_constants_are_not_rule_symbols():
    trs = parse_trs("fresh k0 k1\na -> b\n")
    assert trs.fresh == ("k0", "k1")
    assert trs.constants == ["a", "b"]


def test_error_positions():
    with pytest.raises(ParseError) as info:
        parse_trs("a -> b\nf(a,) -> b\n")
    assert (info.value.line, info.value.column) == (2, 5)
    with pytest.raises(ParseError, match="expected '->'"):
        parse_trs("f(a)\n")


def test_arity_conflicts():
    with pytest.raises(ArityConflict):
        parse_trs("f(a) -> f(a,a)\n")
    with pytest.raises(ArityConflict):
        parse_trs("sig f/2\nf(a) -> a\n")


def test_variable_lhs_and_variable_application():
    with pytest.raises(VariableAsLhs):
        parse_trs("vars x\nx -> a\n")
    with pytest.raises(ParseError, match="cannot take arguments"):
        parse_trs("vars x\nf(x(a)) -> a\n")


def test_variable_and_symbol_clash():
    with pytest.raises(ParseError):
        parse_trs("sig x/0\nvars x\na -> x\n")


def test_canonical_file_round_trips(data_dir):
    text = print_trs(parse_trs((data_dir / "ex21.trs").read_text()))
    assert print_trs(parse_trs(text)) == text


@settings(max_examples=100)
@given(flat_systems)
def test_parser_inverts_printer_on_flat_systems(system):
    trs, _, _ = system
    assert parse_trs(print_trs(trs)) == trs


@settings(max_examples=100)
@given(shallow_systems)
def test_parser_inverts_printer_on_shallow_systems(system):
    trs, _, _ = system
    again = parse_trs(print_trs(trs))
    assert again == trs
    assert print_trs(again) == print_trs(trs)
