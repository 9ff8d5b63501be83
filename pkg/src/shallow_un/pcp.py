"""Rewrite systems encoding Post correspondence problems.

For an instance with tiles ``<u_i, v_i>`` over an alphabet of unary letters,
two linear systems are generated in which the constants ``0`` and ``1`` are
the only ground normal forms, and ``0 <->* 1`` holds exactly when the
instance has a solution.  Words are chains of unary letters closed by the
constant ``∅``; a word is read from the top of the chain downwards.

* ``generate_right_flat``: right-hand sides flat, left-hand sides of height 2.
* ``generate_left_flat``: the reversed system, with ``j0``/``j1`` keeping 0
  and 1 normal forms and ``g_γ_δ`` symbols bridging the two halves.

Superscripted symbols of the construction are spelled ``f_γ``, ``h_i_k``
and ``g_γ_δ``; tile symbols are ``t1, t2, ...``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import IndexOutOfRange, InvalidInstance, NotASolution
from .proof import LR, RL, ProofTrace, Step, apply_step, flip, replay, reverse_steps, rules_resolver
from .terms import App, Term, Var, variables
from .trs import Rule, Trs

EMPTY = "∅"
X, Y, Z = Var("x"), Var("y"), Var("z")


@dataclass(frozen=True)
class PcpInstance:
    alphabet: Tuple[str, ...]
    tiles: Tuple[Tuple[Tuple[str, ...], Tuple[str, ...]], ...]
    allow_empty: bool = False

    def __post_init__(self):
        if not self.tiles:
            raise InvalidInstance("an instance needs at least one tile")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidInstance("alphabet letters must be distinct")
        letters = set(self.alphabet)
        for i, (u, v) in enumerate(self.tiles, 1):
            for w in (u, v):
                bad = [c for c in w if c not in letters]
                if bad:
                    raise InvalidInstance(f"tile {i} uses letter {bad[0]!r} outside the alphabet")
                if not w and not self.allow_empty:
                    raise InvalidInstance(f"tile {i} has an empty word (allow_empty permits it)")

    @classmethod
    def of(cls, alphabet, tiles, allow_empty=False) -> "PcpInstance":
        """Build from strings: ``PcpInstance.of("ab", [("a", "baa"), ...])``."""
        return cls(tuple(alphabet), tuple((tuple(u), tuple(v)) for u, v in tiles), allow_empty)

    def __len__(self):
        return len(self.tiles)

    def tile_name(self, i: int) -> str:
        return f"t{i}"


def _split_word(text: str, letters: Sequence[str]) -> Tuple[str, ...]:
    text = text.strip()
    if text in ("", EMPTY):
        return ()
    if " " in text:
        return tuple(text.split())
    if all(len(c) == 1 for c in letters):
        return tuple(text)
    raise InvalidInstance(f"cannot split {text!r}: multi-character letters need spaces between them")


def parse_pcp(text: str, allow_empty: bool = False) -> PcpInstance:
    """Read ``alphabet: a b`` and ``tile: u / v`` lines; ``#`` starts a comment."""
    alphabet: Optional[List[str]] = None
    raw_tiles = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise InvalidInstance(f"line {lineno}: expected 'alphabet:' or 'tile:'")
        head = head.strip().lower()
        if head == "alphabet":
            alphabet = rest.split()
        elif head == "tile":
            if "/" not in rest:
                raise InvalidInstance(f"line {lineno}: a tile is written 'u / v'")
            u, v = rest.split("/", 1)
            raw_tiles.append((lineno, u, v))
        else:
            raise InvalidInstance(f"line {lineno}: unknown directive {head!r}")
    if alphabet is None:
        raise InvalidInstance("missing 'alphabet:' line")
    tiles = tuple((_split_word(u, alphabet), _split_word(v, alphabet)) for _, u, v in raw_tiles)
    return PcpInstance(tuple(alphabet), tiles, allow_empty)


def format_pcp(p: PcpInstance) -> str:
    def word(w):
        if not w:
            return EMPTY
        return "".join(w) if all(len(c) == 1 for c in p.alphabet) else " ".join(w)

    lines = ["alphabet: " + " ".join(p.alphabet)]
    lines += [f"tile: {word(u)} / {word(v)}" for u, v in p.tiles]
    return "\n".join(lines) + "\n"


def _check_indices(p: PcpInstance, seq: Sequence[int]) -> None:
    if not seq:
        raise InvalidInstance("a tile sequence must be nonempty")
    for i in seq:
        if not 1 <= i <= len(p.tiles):
            raise IndexOutOfRange(f"tile index {i} outside 1..{len(p.tiles)}")


def concatenations(p: PcpInstance, seq: Sequence[int]) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    _check_indices(p, seq)
    top = tuple(c for i in seq for c in p.tiles[i - 1][0])
    bottom = tuple(c for i in seq for c in p.tiles[i - 1][1])
    return top, bottom


def verify_solution(p: PcpInstance, seq: Sequence[int]) -> bool:
    top, bottom = concatenations(p, seq)
    return top == bottom


# -- term helpers -------------------------------------------------------------------


def word_term(word: Sequence[str], tail: Optional[Term] = None) -> Term:
    """``abc`` becomes ``a(b(c(∅)))`` (or ends in ``tail``)."""
    t = tail if tail is not None else App(EMPTY, ())
    for c in reversed(word):
        t = App(c, (t,))
    return t


def tiles_term(seq: Sequence[int], tail: Optional[Term] = None) -> Term:
    t = tail if tail is not None else App(EMPTY, ())
    for i in reversed(seq):
        t = App(f"t{i}", (t,))
    return t


def _letter(word: Sequence[str], k: int, var: Var) -> Term:
    """The k-th letter (1-based) applied to var, or var itself past the word's end."""
    return App(word[k - 1], (var,)) if k <= len(word) else var


def _f(*a):
    return App("f", a)


def _h(*a):
    return App("h", a)


def _g(*a):
    return App("g", a)


# -- generation ---------------------------------------------------------------------


@dataclass
class PcpSystem:
    instance: PcpInstance
    variant: str
    trs: Trs
    index: Dict[tuple, int] = field(default_factory=dict)

    def rule_id(self, *key) -> int:
        return self.index[key]


class _Builder:
    def __init__(self):
        self.pairs: List[Tuple[Term, Term]] = []
        self.index: Dict[tuple, int] = {}

    def add(self, key, lhs, rhs):
        if key in self.index:
            raise AssertionError(f"duplicate rule key {key}")
        self.index[key] = len(self.pairs)
        self.pairs.append((lhs, rhs))


def _names(p: PcpInstance) -> Dict[str, str]:
    """Every generated symbol name with its role; raises on collisions."""
    roles: Dict[str, str] = {}

    def claim(name, role):
        if roles.setdefault(name, role) != role:
            raise InvalidInstance(f"symbol name {name!r} is needed both as {roles[name]} and as {role}")

    for c in p.alphabet:
        claim(c, f"letter {c}")
    for name in ("f", "g", "h", "0", "1", EMPTY, "j0", "j1"):
        claim(name, f"construction symbol {name}")
    for i, (u, v) in enumerate(p.tiles, 1):
        claim(f"t{i}", f"tile {i}")
        for k in range(max(len(u), len(v))):
            claim(f"h_{i}_{k}", f"state {k} of tile {i}")
    for c in p.alphabet:
        claim(f"f_{c}", f"state of letter {c}")
    for c in p.alphabet:
        for d in p.alphabet:
            claim(f"g_{c}_{d}", f"bridge {c},{d}")
    return roles


def _right_core(p: PcpInstance, b: _Builder, reverse: bool) -> None:
    """R_S and R_T, optionally reversed."""

    def add(key, lhs, rhs):
        if reverse:
            b.add(key, rhs, lhs)
        else:
            b.add(key, lhs, rhs)

    for c in p.alphabet:
        fc = f"f_{c}"
        add(("S-peel", c), _f(App(c, (X,)), Y, Z), App(fc, (X, Y, Z)))
        add(("S-push", c), _f(X, App(c, (Y,)), App(c, (Z,))), App(fc, (X, Y, Z)))
    for i, (u, v) in enumerate(p.tiles, 1):
        n = max(len(u), len(v))
        ti = App(f"t{i}", (X,))
        if n == 0:
            add(("T-start", i), _h(ti, Y, Z), _h(X, Y, Z))
            continue
        add(("T-start", i), _h(ti, Y, Z), App(f"h_{i}_0", (X, Y, Z)))
        for k in range(1, n):
            add(("T-mid", i, k), App(f"h_{i}_{k}", (X, _letter(u, k, Y), _letter(v, k, Z))),
                App(f"h_{i}_{k - 1}", (X, Y, Z)))
        add(("T-end", i), _h(X, _letter(u, n, Y), _letter(v, n, Z)), App(f"h_{i}_{n - 1}", (X, Y, Z)))


def _self_loops(p: PcpInstance, b: _Builder, with_g: bool) -> None:
    def loop(name, args):
        t = App(name, args)
        b.add(("nf", name), t, t)

    loop("f", (X, Y, Z))
    loop("h", (X, Y, Z))
    for c in p.alphabet:
        loop(f"f_{c}", (X, Y, Z))
    for i, (u, v) in enumerate(p.tiles, 1):
        for k in range(max(len(u), len(v))):
            loop(f"h_{i}_{k}", (X, Y, Z))
    if with_g:
        loop("g", (X, Y))
    for c in p.alphabet:
        loop(c, (X,))
    loop(EMPTY, ())
    for i in range(1, len(p.tiles) + 1):
        loop(f"t{i}", (X,))


def _finish(p: PcpInstance, b: _Builder, variant: str) -> PcpSystem:
    trs = Trs.build(b.pairs, declared_vars=("x", "y", "z"))
    return PcpSystem(p, variant, trs, dict(b.index))


def generate_right_flat(p: PcpInstance) -> PcpSystem:
    _names(p)
    b = _Builder()
    zero, one, empty = App("0", ()), App("1", ()), App(EMPTY, ())
    for c in p.alphabet:
        b.add(("0", c), _f(App(c, (X,)), empty, empty), zero)
    b.add(("f-g",), _f(empty, X, Y), _g(X, Y))
    for i in range(1, len(p.tiles) + 1):
        b.add(("1", i), _h(App(f"t{i}", (X,)), empty, empty), one)
    b.add(("h-g",), _h(empty, X, Y), _g(X, Y))
    _right_core(p, b, reverse=False)
    _self_loops(p, b, with_g=True)
    return _finish(p, b, "right-flat")


def generate_left_flat(p: PcpInstance) -> PcpSystem:
    _names(p)
    b = _Builder()
    zero, one, empty = App("0", ()), App("1", ()), App(EMPTY, ())
    b.add(("j0", "0"), App("j0", (X,)), zero)
    b.add(("j0", "f"), App("j0", (X,)), _f(X, empty, empty))
    b.add(("j1", "h"), App("j1", (X,)), _h(X, empty, empty))
    b.add(("j1", "1"), App("j1", (X,)), one)
    for c in p.alphabet:
        b.add(("g-f", c), App(f"g_{c}_{c}", (X, Y)), _f(empty, App(c, (X,)), App(c, (Y,))))
    for c in p.alphabet:
        for d in p.alphabet:
            b.add(("g-h", c, d), App(f"g_{c}_{d}", (X, Y)), _h(empty, App(c, (X,)), App(d, (Y,))))
    _right_core(p, b, reverse=True)
    _self_loops(p, b, with_g=False)
    for c in p.alphabet:
        for d in p.alphabet:
            t = App(f"g_{c}_{d}", (X, Y))
            b.add(("nf", f"g_{c}_{d}"), t, t)
    return _finish(p, b, "left-flat")


def generate(p: PcpInstance, variant: str) -> PcpSystem:
    if variant == "right-flat":
        return generate_right_flat(p)
    if variant == "left-flat":
        return generate_left_flat(p)
    raise ValueError(f"unknown variant {variant!r}")


# -- derivations ------------------------------------------------------------------------


class _Trace:
    """Accumulates steps while tracking the current term."""

    def __init__(self, system: PcpSystem, start: Term):
        self.system = system
        self.resolve = rules_resolver(system.trs.rules)
        self.start = start
        self.current = start
        self.steps: List[Step] = []

    def apply(self, key, logical_dir: str, subst: Dict[str, Term]) -> None:
        """Apply the rule stored under ``key``; ``logical_dir`` refers to the
        right-flat orientation and is flipped for reversed families."""
        d = logical_dir
        if self.system.variant == "left-flat" and key[0] in ("S-peel", "S-push", "T-start", "T-mid", "T-end"):
            d = flip(d)
        step = Step((), self.system.rule_id(*key), d, subst)
        self.current = apply_step(self.current, step, self.resolve)
        self.steps.append(step)


def f_reach_steps(system: PcpSystem, word: Sequence[str], y: Optional[Term] = None) -> List[Step]:
    """Steps from ``f(s, y, y)`` to ``f(∅, s^R y, s^R y)`` (default ``y = ∅``)."""
    y = y if y is not None else App(EMPTY, ())
    tr = _Trace(system, _f(word_term(word), y, y))
    cur_y = y
    for k, c in enumerate(word):
        rest = word_term(word[k + 1:])
        sub = {"x": rest, "y": cur_y, "z": cur_y}
        tr.apply(("S-peel", c), LR, sub)
        tr.apply(("S-push", c), RL, sub)
        cur_y = App(c, (cur_y,))
    return tr.steps


def h_reach_steps(system: PcpSystem, seq: Sequence[int]) -> List[Step]:
    """Steps from ``h(t_seq, ∅, ∅)`` to ``h(∅, s_a^R, s_b^R)``."""
    p = system.instance
    _check_indices(p, seq)
    empty = App(EMPTY, ())
    tr = _Trace(system, _h(tiles_term(seq), empty, empty))
    ycur, zcur = empty, empty
    for pos, i in enumerate(seq):
        u, v = p.tiles[i - 1]
        n = max(len(u), len(v))
        xrest = tiles_term(seq[pos + 1:])
        tr.apply(("T-start", i), LR, {"x": xrest, "y": ycur, "z": zcur})
        for k in range(1, n):
            tr.apply(("T-mid", i, k), RL, {"x": xrest, "y": ycur, "z": zcur})
            ycur, zcur = _letter(u, k, ycur), _letter(v, k, zcur)
        if n:
            tr.apply(("T-end", i), RL, {"x": xrest, "y": ycur, "z": zcur})
            ycur, zcur = _letter(u, n, ycur), _letter(v, n, zcur)
    return tr.steps


def solution_derivation(p: PcpInstance, seq: Sequence[int], variant: str = "right-flat",
                        system: Optional[PcpSystem] = None) -> Tuple[PcpSystem, ProofTrace]:
    """An explicit rule-level proof of ``0 <->* 1`` induced by a solution."""
    if not verify_solution(p, seq):
        raise NotASolution(f"{','.join(map(str, seq))} is not a solution")
    w, _ = concatenations(p, seq)
    if not w:
        raise InvalidInstance("the solution spells the empty word, which the construction excludes")
    system = system or generate(p, variant)
    zero, one, empty = App("0", ()), App("1", ()), App(EMPTY, ())
    wr = word_term(tuple(reversed(w)))
    tr = _Trace(system, zero)
    if variant == "right-flat":
        tr.apply(("0", w[0]), RL, {"x": word_term(w[1:])})
    else:
        tr.apply(("j0", "0"), RL, {"x": word_term(w)})
        tr.apply(("j0", "f"), LR, {"x": word_term(w)})
    f_steps = f_reach_steps(system, w)
    tr.steps.extend(f_steps)
    tr.current = _f(empty, wr, wr)
    if variant == "right-flat":
        tr.apply(("f-g",), LR, {"x": wr, "y": wr})
        tr.apply(("h-g",), RL, {"x": wr, "y": wr})
    else:
        c, inner = wr.fn, wr.args[0]
        tr.apply(("g-f", c), RL, {"x": inner, "y": inner})
        tr.apply(("g-h", c, c), LR, {"x": inner, "y": inner})
    tr.steps.extend(reverse_steps(h_reach_steps(system, seq)))
    tr.current = _h(tiles_term(seq), empty, empty)
    if variant == "right-flat":
        tr.apply(("1", seq[0]), LR, {"x": tiles_term(seq[1:])})
    else:
        tr.apply(("j1", "h"), RL, {"x": tiles_term(seq)})
        tr.apply(("j1", "1"), LR, {"x": tiles_term(seq)})
    trace = ProofTrace((zero, one), tr.steps, lowered=True)
    seqs = replay(zero, trace.steps, rules_resolver(system.trs.rules))
    if seqs[-1] != one:
        raise AssertionError("generated derivation does not end in 1")
    return system, trace


def trace_terms(system: PcpSystem, trace: ProofTrace) -> List[Term]:
    return replay(trace.endpoints[0], trace.steps, rules_resolver(system.trs.rules))


def structural_report(system: PcpSystem) -> Dict[str, bool]:
    """The shape guarantees of the construction, checked on the emitted rules."""
    rules = system.trs.rules
    return {
        "linear": all(r.linear for r in rules),
        "right_flat": all(r.rhs.height <= 1 for r in rules),
        "left_flat": all(r.lhs.height <= 1 for r in rules),
        "max_lhs_height": max(r.lhs.height for r in rules),
        "max_rhs_height": max(r.rhs.height for r in rules),
        "rhs_vars_in_lhs": all(_vars(r.rhs) <= _vars(r.lhs) for r in rules),
    }


def _vars(t: Term) -> set:
    return set(variables(t))
