import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_solvable_pcp

from shallow_un.equiv import oracle_equiv, verify_trace
from shallow_un.errors import IndexOutOfRange, InvalidInstance, NotASolution
from shallow_un.pcp import (
    EMPTY,
    PcpInstance,
    concatenations,
    f_reach_steps,
    format_pcp,
    generate,
    generate_left_flat,
    generate_right_flat,
    h_reach_steps,
    parse_pcp,
    solution_derivation,
    structural_report,
    tiles_term,
    trace_terms,
    verify_solution,
    word_term,
)
from shallow_un.proof import replay, rules_resolver
from shallow_un.syntax import parse_term, parse_trs, print_trs
from shallow_un.terms import App
from shallow_un.trs import enumerate_normal_forms

empty = App(EMPTY)
FIG1 = PcpInstance.of("ab", [("a", "baa"), ("ab", "aa"), ("bba", "bb")])


def w(text):
    return word_term(tuple(text))


def test_parse_and_format(data_dir):
    p = parse_pcp((data_dir / "fig1.pcp").read_text())
    assert p == FIG1
    assert parse_pcp(format_pcp(p)) == p


def test_parse_errors():
    with pytest.raises(InvalidInstance, match="alphabet"):
        parse_pcp("tile: a / b\n")
    with pytest.raises(InvalidInstance, match="outside the alphabet"):
        parse_pcp("alphabet: a\ntile: a / c\n")
    with pytest.raises(InvalidInstance, match="empty word"):
        parse_pcp("alphabet: a\ntile: a / ∅\n")
    assert parse_pcp("alphabet: a\ntile: a / ∅\n", allow_empty=True).tiles[0][1] == ()


def test_solution_check():
    assert verify_solution(FIG1, [3, 2, 3, 1])
    assert not verify_solution(FIG1, [1, 2])
    assert concatenations(FIG1, [3, 2, 3, 1])[0] == tuple("bbaabbbaa")
    with pytest.raises(IndexOutOfRange):
        verify_solution(FIG1, [4])


def test_symbol_collisions_are_refused():
    with pytest.raises(InvalidInstance, match="needed both"):
        generate_right_flat(PcpInstance.of(["h", "b"], [(["h"], ["b"])]))


def test_tile_expansion_for_aab_over_bb():
    system = generate_right_flat(PcpInstance.of("ab", [("aab", "bb")]))
    rules = system.trs.by_id
    got = [str(rules[system.rule_id(*key)]) for key in
           [("T-start", 1), ("T-mid", 1, 1), ("T-mid", 1, 2), ("T-end", 1)]]
    assert got == [
        "h(t1(x),y,z) -> h_1_0(x,y,z)",
        "h_1_1(x,a(y),b(z)) -> h_1_0(x,y,z)",
        "h_1_2(x,a(y),b(z)) -> h_1_1(x,y,z)",
        "h(x,b(y),z) -> h_1_2(x,y,z)",
    ]


def test_left_flat_bridge_and_guard_rules():
    system = generate_left_flat(PcpInstance.of("ab", [("a", "a")]))
    text = [str(r) for r in system.trs.rules]
    for rule in ["j0(x) -> 0", "j0(x) -> f(x,∅,∅)", "j1(x) -> h(x,∅,∅)", "j1(x) -> 1",
                 "g_a_a(x,y) -> f(∅,a(x),a(y))", "g_a_b(x,y) -> h(∅,a(x),b(y))"]:
        assert rule in text
    assert "g(x,y) -> g(x,y)" not in text


def test_figure_one_derivation():
    system, trace = solution_derivation(FIG1, [3, 2, 3, 1])
    assert verify_trace(trace, system.trs)
    seen = set(trace_terms(system, trace))
    wr = w("aabbbaabb")
    assert App("f", (empty, wr, wr)) in seen
    assert App("g", (wr, wr)) in seen
    assert App("h", (tiles_term([3, 2, 3, 1]), empty, empty)) in seen
    assert App("h_1_2", (empty, wr, w("abbbaabb"))) in seen
    assert App("f_b", (w("baabbbaa"), empty, empty)) in seen


def test_derivation_rejects_non_solutions():
    with pytest.raises(NotASolution):
        solution_derivation(FIG1, [1, 2])


def test_trivial_instance_both_variants():
    p = PcpInstance.of("a", [("a", "a")])
    for variant in ("right-flat", "left-flat"):
        system, trace = solution_derivation(p, [1], variant)
        assert verify_trace(trace, system.trs)
        terms = trace_terms(system, trace)
        if variant == "right-flat":
            assert App("g", (w("a"), w("a"))) in terms
        else:
            assert any(t.fn == "g_a_a" for t in terms)


def test_trivial_instance_is_found_by_search():
    system = generate_right_flat(PcpInstance.of("a", [("a", "a")]))
    r = oracle_equiv(App("0"), App("1"), system.trs, size_cap=8, step_cap=10, node_budget=50_000)
    assert r.equivalent and verify_trace(r.trace, system.trs)


def test_non_injective_tiles_share_an_h_term():
    p = PcpInstance.of("ab", [("abb", "ba"), ("bb", "ba")])
    trs = generate_right_flat(p).trs
    mid = App("h", (empty, w("bba"), w("ab")))
    one = oracle_equiv(App("h", (tiles_term([1]), empty, empty)), mid, trs, size_cap=12, step_cap=8)
    two = oracle_equiv(App("h", (tiles_term([2]), w("a"), empty)), mid, trs, size_cap=12, step_cap=8)
    assert one.equivalent and two.equivalent


def test_unsolvable_toy_stays_unknown():
    trs = generate_right_flat(PcpInstance.of("ab", [("a", "b")])).trs
    r = oracle_equiv(App("0"), App("1"), trs, size_cap=9, step_cap=8, node_budget=30_000)
    assert r.status == "unknown"


@pytest.mark.parametrize("variant", ["right-flat", "left-flat"])
def test_zero_and_one_are_the_only_ground_normal_forms(variant):
    trs = generate(FIG1, variant).trs
    nfs = enumerate_normal_forms(trs, 3, use_declared=True)
    assert set(nfs) == {App("0"), App("1")}


@pytest.mark.parametrize("variant", ["right-flat", "left-flat"])
def test_generation_is_deterministic_and_parses_back(variant):
    one, two = generate(FIG1, variant), generate(FIG1, variant)
    text = print_trs(one.trs)
    assert text == print_trs(two.trs)
    assert parse_trs(text) == one.trs


# -- properties -----------------------------------------------------------------------

words = st.lists(st.sampled_from("ab"), min_size=1, max_size=4).map("".join)
instances = st.lists(st.tuples(words, words), min_size=1, max_size=3).map(lambda ts: PcpInstance.of("ab", ts))


@settings(max_examples=50, deadline=None)
@given(instances)
def test_right_flat_shape(p):
    report = structural_report(generate_right_flat(p))
    assert report["linear"] and report["right_flat"] and report["max_lhs_height"] <= 2


@settings(max_examples=50, deadline=None)
@given(instances)
def test_left_flat_shape(p):
    report = structural_report(generate_left_flat(p))
    assert report["linear"] and report["left_flat"]
    assert report["max_rhs_height"] <= 2 and report["rhs_vars_in_lhs"]


@settings(max_examples=40, deadline=None)
@given(instances, words, st.sampled_from(["right-flat", "left-flat"]))
def test_f_reach(p, word, variant):
    system = generate(p, variant)
    steps = f_reach_steps(system, tuple(word))
    end = replay(App("f", (w(word), empty, empty)), steps, rules_resolver(system.trs.rules))[-1]
    rev = w(word[::-1])
    assert end == App("f", (empty, rev, rev))


@settings(max_examples=40, deadline=None)
@given(instances, st.data(), st.sampled_from(["right-flat", "left-flat"]))
def test_h_reach(p, data, variant):
    seq = data.draw(st.lists(st.integers(1, len(p)), min_size=1, max_size=3))
    system = generate(p, variant)
    top, bottom = concatenations(p, seq)
    end = replay(App("h", (tiles_term(seq), empty, empty)), h_reach_steps(system, seq),
                 rules_resolver(system.trs.rules))[-1]
    assert end == App("h", (empty, word_term(top[::-1]), word_term(bottom[::-1])))


@pytest.mark.parametrize("variant", ["right-flat", "left-flat"])
def test_planted_solutions_replay(variant):
    rng = random.Random(11)
    for _ in range(20):
        p, seq = random_solvable_pcp(rng)
        assert verify_solution(p, seq)
        system, trace = solution_derivation(p, seq, variant)
        assert verify_trace(trace, system.trs)
        assert trace.endpoints == (App("0"), App("1"))


def test_parse_term_reads_words_with_empty_tail():
    assert parse_term("a(b(∅))") == w("ab")
