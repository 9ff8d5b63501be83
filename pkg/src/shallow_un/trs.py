"""Rewrite rules and systems: applicability, one-step rewriting, normal forms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import ArityConflict, CapExceeded, NotFlat, VariableAsLhs
from .proof import LR, RL, Step
from .terms import (
    App,
    Position,
    Term,
    Var,
    apply_subst,
    is_flat,
    is_linear,
    is_shallow,
    match_term,
    replace_at,
    subterms,
    symbols_of,
    term_key,
    variables,
)

DEFAULT_NF_CAP = 200_000


@dataclass(frozen=True)
class Rule:
    id: int
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise VariableAsLhs(f"rule {self.id}: left-hand side {self.lhs} is a variable")

    @property
    def flat(self) -> bool:
        return is_flat(self.lhs) and is_flat(self.rhs)

    @property
    def shallow(self) -> bool:
        return is_shallow(self.lhs) and is_shallow(self.rhs)

    @property
    def collapsing(self) -> bool:
        return isinstance(self.rhs, Var)

    @property
    def linear(self) -> bool:
        return is_linear(self.lhs) and is_linear(self.rhs)

    def __str__(self):
        return f"{self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class Trs:
    rules: Tuple[Rule, ...]
    signature: Mapping[str, int] = field(default_factory=dict)
    declared_vars: FrozenSet[str] = frozenset()
    fresh: Tuple[str, ...] = ()

    @classmethod
    def build(cls, pairs: Iterable[Tuple[Term, Term]], signature: Optional[Mapping[str, int]] = None,
              declared_vars: Iterable[str] = (), fresh: Sequence[str] = ()) -> "Trs":
        rules = tuple(Rule(i, l, r) for i, (l, r) in enumerate(pairs))
        return cls.from_rules(rules, signature, declared_vars, fresh)

    @classmethod
    def from_rules(cls, rules: Iterable[Rule], signature: Optional[Mapping[str, int]] = None,
                   declared_vars: Iterable[str] = (), fresh: Sequence[str] = ()) -> "Trs":
        rules = tuple(rules)
        sig: Dict[str, int] = dict(signature or {})
        for r in rules:
            for side in (r.lhs, r.rhs):
                for name, arity in symbols_of(side).items():
                    known = sig.setdefault(name, arity)
                    if known != arity:
                        raise ArityConflict(f"symbol {name} used with arity {arity} and {known}")
        for name in fresh:
            if sig.setdefault(name, 0) != 0:
                raise ArityConflict(f"fresh constant {name} clashes with a function symbol")
        ids = [r.id for r in rules]
        if len(set(ids)) != len(ids):
            raise ValueError("rule ids must be distinct")
        return cls(rules, dict(sorted(sig.items())), frozenset(declared_vars), tuple(fresh))

    # -- derived views ------------------------------------------------------

    @cached_property
    def rule_symbols(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for r in self.rules:
            out.update(symbols_of(r.lhs))
            out.update(symbols_of(r.rhs))
        return dict(sorted(out.items()))

    @cached_property
    def constants(self) -> List[str]:
        """Nullary symbols occurring in the rules (fresh constants excluded)."""
        return [n for n, a in self.rule_symbols.items() if a == 0]

    @cached_property
    def max_arity(self) -> int:
        return max(self.rule_symbols.values(), default=0)

    @cached_property
    def by_root(self) -> Dict[str, List[Rule]]:
        out: Dict[str, List[Rule]] = {}
        for r in self.rules:
            out.setdefault(r.lhs.fn, []).append(r)
        return out

    @cached_property
    def by_id(self) -> Dict[int, Rule]:
        return {r.id: r for r in self.rules}

    def is_flat(self) -> bool:
        return all(r.flat for r in self.rules)

    def is_shallow(self) -> bool:
        return all(r.shallow for r in self.rules)

    def is_linear(self) -> bool:
        return all(r.linear for r in self.rules)

    def enumeration_symbols(self, use_declared: bool = False) -> Dict[str, int]:
        syms = dict(self.signature if use_declared else self.rule_symbols)
        for name in self.fresh:
            syms[name] = 0
        return dict(sorted(syms.items()))

    def resolve(self, rule_id: int):
        r = self.by_id.get(rule_id)
        return None if r is None else (r.lhs, r.rhs)

    def __str__(self):
        return "\n".join(str(r) for r in self.rules)


# -- patterns and root applicability ----------------------------------------------


def rule_pattern(rule: Rule) -> FrozenSet[Tuple[int, int]]:
    """Pairs i < j of argument positions where the lhs carries the same variable."""
    lhs = rule.lhs
    out = set()
    for i, j in itertools.combinations(range(len(lhs.args)), 2):
        a, b = lhs.args[i], lhs.args[j]
        if isinstance(a, Var) and a == b:
            out.add((i, j))
    return frozenset(out)


def pattern_wrt(rule: Rule, t: Term) -> Optional[FrozenSet[Tuple[int, int]]]:
    """Equalities of t over the positions named in the rule's pattern.

    None when the roots differ (the pattern is then undefined).
    """
    lhs = rule.lhs
    if not isinstance(t, App) or t.fn != lhs.fn or len(t.args) != len(lhs.args):
        return None
    involved = sorted({i for pair in rule_pattern(rule) for i in pair})
    return frozenset(
        (i, j) for i, j in itertools.combinations(involved, 2) if t.args[i] == t.args[j]
    )


def rule_applies_at_root(rule: Rule, t: Term) -> bool:
    """Applicability of a flat rule at the root via constants and variable patterns."""
    if not rule.flat:
        raise NotFlat(f"rule {rule.id} is not flat")
    lhs = rule.lhs
    if not lhs.args:
        return t == lhs
    patt_t = pattern_wrt(rule, t)
    if patt_t is None:
        return False
    for li, ti in zip(lhs.args, t.args):
        if not isinstance(li, Var) and li != ti:
            return False
    return rule_pattern(rule) <= patt_t


def root_reducible(t: Term, trs: Trs) -> bool:
    if not isinstance(t, App):
        return False
    for r in trs.by_root.get(t.fn, ()):
        if len(r.lhs.args) != len(t.args):
            continue
        if r.flat:
            if rule_applies_at_root(r, t):
                return True
        elif match_term(r.lhs, t) is not None:
            return True
    return False


def is_normal_form(t: Term, trs: Trs) -> bool:
    return not any(root_reducible(s, trs) for _, s in subterms(t))


# -- one-step rewriting --------------------------------------------------------------


def _instances(sigma: Dict[str, Term], extra: Sequence[str], pool: Sequence[Term]) -> Iterator[Dict[str, Term]]:
    if not extra:
        yield sigma
        return
    for combo in itertools.product(pool, repeat=len(extra)):
        full = dict(sigma)
        full.update(zip(extra, combo))
        yield full


def one_step_successors(t: Term, trs: Trs, direction: str = "forward",
                        pool: Sequence[Term] = (), max_size: Optional[int] = None) -> List[Tuple[Term, Step]]:
    """Every term reachable from t by one rule application.

    ``direction`` is ``forward`` (rules left to right) or ``symmetric``
    (also right to left).  Variables of the target side that the source side
    does not bind are drawn from ``pool``; an empty pool drops those steps.
    Results come in position pre-order, then rule id, then lr before rl.
    """
    if direction not in ("forward", "symmetric"):
        raise ValueError(f"unknown direction {direction!r}")
    out: List[Tuple[Term, Step]] = []
    seen = set()
    orientations = [LR] if direction == "forward" else [LR, RL]
    for pos, sub in subterms(t):
        for rule in trs.rules:
            for d in orientations:
                src, dst = (rule.lhs, rule.rhs) if d == LR else (rule.rhs, rule.lhs)
                sigma = match_term(src, sub)
                if sigma is None:
                    continue
                extra = [v for v in variables(dst) if v not in sigma]
                for full in _instances(sigma, extra, pool):
                    new = replace_at(t, pos, apply_subst(dst, full))
                    if max_size is not None and new.size > max_size:
                        continue
                    step = Step(pos, rule.id, d, full)
                    key = (new, pos, rule.id, d, tuple(sorted(full.items(), key=lambda kv: kv[0])))
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append((new, step))
    return out


# -- signature extension and enumeration --------------------------------------------------


def extend_signature(trs: Trs) -> Trs:
    """Add 3*alpha inert constants (alpha = max rule arity, at least 1)."""
    alpha = max(1, trs.max_arity)
    taken = set(trs.signature) | set(trs.declared_vars)
    prefix = "_k"
    while any(f"{prefix}{i}" in taken for i in range(3 * alpha)):
        prefix = "_" + prefix
    names = tuple(f"{prefix}{i}" for i in range(3 * alpha))
    return Trs.from_rules(trs.rules, trs.signature, trs.declared_vars, trs.fresh + names)


def _root_ok(fn: str, args: Tuple[Term, ...], trs: Trs) -> Optional[Term]:
    t = App(fn, args)
    return None if root_reducible(t, trs) else t


def enumerate_normal_forms(trs: Trs, max_height: int, cap: int = DEFAULT_NF_CAP,
                           use_declared: bool = False) -> List[Term]:
    """Ground normal forms of height <= max_height, ordered by height then term order."""
    syms = trs.enumeration_symbols(use_declared)
    layers: List[List[Term]] = []
    total = 0
    for h in range(max_height + 1):
        layer: List[Term] = []
        if h == 0:
            for name, arity in syms.items():
                if arity == 0:
                    t = _root_ok(name, (), trs)
                    if t is not None:
                        layer.append(t)
        else:
            below = [t for lay in layers for t in lay]
            newest = set(layers[h - 1])
            for name, arity in syms.items():
                if arity == 0:
                    continue
                for args in itertools.product(below, repeat=arity):
                    if not any(a in newest for a in args):
                        continue
                    t = _root_ok(name, args, trs)
                    if t is not None:
                        layer.append(t)
                        if total + len(layer) > cap:
                            raise CapExceeded(
                                f"more than {cap} normal forms of height <= {max_height}",
                                partial_count=total + len(layer) - 1,
                            )
        layer.sort(key=term_key)
        total += len(layer)
        if total > cap:
            raise CapExceeded(f"more than {cap} normal forms of height <= {max_height}", partial_count=total)
        layers.append(layer)
        if not layer:
            break
    return [t for lay in layers for t in lay]


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class NormalFormsBySize:
    """Ground normal forms of bounded height, generated one size layer at a time.

    ``layer(n)`` returns the normal forms of size exactly n in term order;
    layers are built lazily from the smaller ones, so a caller can stop as
    soon as it has what it needs.
    """

    def __init__(self, trs: Trs, max_height: int, cap: int = DEFAULT_NF_CAP, use_declared: bool = False):
        self.trs = trs
        self.max_height = max_height
        self.cap = cap
        self.syms = trs.enumeration_symbols(use_declared)
        alpha = max(self.syms.values(), default=0)
        if alpha <= 1:
            self.max_size = max_height + 1 if alpha == 1 else 1
        else:
            self.max_size = (alpha ** (max_height + 1) - 1) // (alpha - 1)
        self.alpha = alpha
        self._layers: List[List[Term]] = [[]]
        self.count = 0
        self.largest = 0  # largest size with a nonempty layer so far

    def exhausted_from(self, n: int) -> bool:
        """True when no normal form of size >= n can exist (given layers below n are built)."""
        if n > self.max_size:
            return True
        if len(self._layers) < n:
            return False
        return n > self.alpha * self.largest + 1

    def layer(self, n: int) -> List[Term]:
        while len(self._layers) <= n:
            self._build(len(self._layers))
        return self._layers[n]

    def _build(self, n: int) -> None:
        out: List[Term] = []
        if n == 1:
            for name, arity in self.syms.items():
                if arity == 0:
                    t = _root_ok(name, (), self.trs)
                    if t is not None:
                        out.append(t)
        elif n <= self.max_size:
            for name, arity in self.syms.items():
                if arity == 0:
                    continue
                for sizes in _compositions(n - 1, arity):
                    pools = [self._layers[s] for s in sizes]
                    if not all(pools):
                        continue
                    for args in itertools.product(*pools):
                        if max(a.height for a in args) >= self.max_height:
                            continue
                        t = _root_ok(name, args, self.trs)
                        if t is not None:
                            out.append(t)
                            if self.count + len(out) > self.cap:
                                raise CapExceeded(
                                    f"more than {self.cap} normal forms of height <= {self.max_height}",
                                    partial_count=self.count + len(out) - 1,
                                )
        out.sort(key=term_key)
        self.count += len(out)
        if out:
            self.largest = n
        self._layers.append(out)
