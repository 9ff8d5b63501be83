"""First-order terms, positions, substitutions, matching and unification.

Terms are immutable.  ``Var`` carries a name, ``App`` a function symbol
name plus an argument tuple; the arity of an application is the length of
its argument tuple.  Hash, size and height are computed once at
construction since every analysis in the package leans on them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Optional, Tuple

from .errors import InvalidPosition

Position = Tuple[int, ...]
Substitution = Dict[str, "Term"]


@dataclass(frozen=True, order=True)
class Symbol:
    name: str
    arity: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("symbol name must be nonempty")
        if self.arity < 0:
            raise ValueError("arity must be a natural number")

    def __str__(self):
        return f"{self.name}/{self.arity}"


class Term:
    __slots__ = ()

    size: int
    height: int

    def is_var(self) -> bool:
        return isinstance(self, Var)

    def is_constant(self) -> bool:
        return isinstance(self, App) and not self.args


class Var(Term):
    __slots__ = ("name", "_hash")

    size = 1
    height = 0

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("V", name))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, Var) and self.name == other.name)

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


class App(Term):
    __slots__ = ("fn", "args", "_hash", "size", "height", "ground")

    def __init__(self, fn: str, args: Tuple[Term, ...] = ()):
        args = tuple(args)
        self.fn = fn
        self.args = args
        self._hash = hash((fn, args))
        if args:
            self.size = 1 + sum(a.size for a in args)
            self.height = 1 + max(a.height for a in args)
            self.ground = all(not isinstance(a, Var) and a.ground for a in args)
        else:
            self.size = 1
            self.height = 0
            self.ground = True

    @property
    def symbol(self) -> Symbol:
        return Symbol(self.fn, len(self.args))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.fn == other.fn
            and self.args == other.args
        )

    def __repr__(self):
        return f"App({self.fn!r}, {self.args!r})"

    def __str__(self):
        if not self.args:
            return self.fn
        return f"{self.fn}({','.join(str(a) for a in self.args)})"


def const(name: str) -> App:
    return App(name, ())


def is_ground(t: Term) -> bool:
    return isinstance(t, App) and t.ground


def root(t: Term) -> Optional[str]:
    return t.fn if isinstance(t, App) else None


def term_key(t: Term):
    """Total order on terms: variables first, then by symbol name and arguments."""
    if isinstance(t, Var):
        return (0, t.name)
    return (1, t.fn, tuple(term_key(a) for a in t.args))


# -- positions ---------------------------------------------------------------


def subterm_at(t: Term, p: Position) -> Term:
    """Return t|_p.  Positions are zero-based child indices."""
    for depth, k in enumerate(p):
        if not isinstance(t, App) or not 0 <= k < len(t.args):
            raise InvalidPosition(f"position {list(p)} invalid at depth {depth} of {t}")
        t = t.args[k]
    return t


def replace_at(t: Term, p: Position, s: Term) -> Term:
    if not p:
        return s
    k = p[0]
    if not isinstance(t, App) or not 0 <= k < len(t.args):
        raise InvalidPosition(f"position {list(p)} invalid for {t}")
    args = list(t.args)
    args[k] = replace_at(args[k], p[1:], s)
    return App(t.fn, tuple(args))


def positions(t: Term) -> Iterator[Position]:
    """All positions of t in pre-order (root first, children left to right)."""
    yield ()
    if isinstance(t, App):
        for k, a in enumerate(t.args):
            for p in positions(a):
                yield (k,) + p


def subterms(t: Term) -> Iterator[Tuple[Position, Term]]:
    yield (), t
    if isinstance(t, App):
        for k, a in enumerate(t.args):
            for p, s in subterms(a):
                yield (k,) + p, s


def variables(t: Term) -> list:
    """Variable names of t in first-occurrence order (no repeats)."""
    seen: Dict[str, None] = {}
    _collect_vars(t, seen)
    return list(seen)


def _collect_vars(t: Term, seen: Dict[str, None]) -> None:
    if isinstance(t, Var):
        seen.setdefault(t.name, None)
    elif not t.ground:
        for a in t.args:
            _collect_vars(a, seen)


def var_occurrences(t: Term) -> Dict[str, int]:
    counts: Dict[str, int] = {}
    for _, s in subterms(t):
        if isinstance(s, Var):
            counts[s.name] = counts.get(s.name, 0) + 1
    return counts


def is_linear(t: Term) -> bool:
    return all(n == 1 for n in var_occurrences(t).values())


def symbols_of(t: Term) -> Dict[str, int]:
    out: Dict[str, int] = {}
    for _, s in subterms(t):
        if isinstance(s, App):
            out.setdefault(s.fn, len(s.args))
    return out


def is_flat(t: Term) -> bool:
    return t.height <= 1


def is_shallow(t: Term) -> bool:
    """Every variable occurrence sits at depth 0 or 1."""
    if isinstance(t, Var):
        return True
    return all(isinstance(a, Var) or a.ground for a in t.args)


# -- substitutions -------------------------------------------------------------


def apply_subst(t: Term, sigma: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if t.ground:
        return t
    return App(t.fn, tuple(apply_subst(a, sigma) for a in t.args))


def rename(t: Term, mapping: Mapping[str, str]) -> Term:
    return apply_subst(t, {k: Var(v) for k, v in mapping.items()})


def match_term(pattern: Term, subject: Term, sigma: Optional[Substitution] = None) -> Optional[Substitution]:
    """One-way matching: the substitution s with pattern·s == subject, or None.

    Repeated pattern variables must meet equal subject subterms.
    """
    sigma = dict(sigma) if sigma else {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = s
            elif bound != s:
                return None
        elif p.ground:
            if p != s:
                return None
        elif isinstance(s, App) and s.fn == p.fn and len(s.args) == len(p.args):
            stack.extend(zip(p.args, s.args))
        else:
            return None
    return sigma


def _walk(t: Term, sigma: Substitution) -> Term:
    while isinstance(t, Var) and t.name in sigma:
        t = sigma[t.name]
    return t


def _occurs(name: str, t: Term, sigma: Substitution) -> bool:
    t = _walk(t, sigma)
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs(name, a, sigma) for a in t.args)


def unify(s: Term, t: Term) -> Optional[Substitution]:
    """Most general unifier with occurs check, or None.

    The result is idempotent; a variable-variable equation binds the
    left-hand variable, so f(x,x) against f(x',x') yields {x: x'}.
    """
    sigma: Substitution = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, sigma), _walk(b, sigma)
        if a == b:
            continue
        if isinstance(a, Var):
            if _occurs(a.name, b, sigma):
                return None
            sigma[a.name] = b
        elif isinstance(b, Var):
            if _occurs(b.name, a, sigma):
                return None
            sigma[b.name] = a
        elif a.fn == b.fn and len(a.args) == len(b.args):
            stack.extend(reversed(list(zip(a.args, b.args))))
        else:
            return None
    return {k: _resolve(v, sigma) for k, v in sigma.items()}


def _resolve(t: Term, sigma: Substitution) -> Term:
    t = _walk(t, sigma)
    if isinstance(t, Var) or t.ground:
        return t
    return App(t.fn, tuple(_resolve(a, sigma) for a in t.args))


# -- canonical renaming ----------------------------------------------------------


def canonical_mapping(*terms: Term, prefix: str = "v") -> Dict[str, str]:
    mapping: Dict[str, str] = {}
    for t in terms:
        for name in variables(t):
            if name not in mapping:
                mapping[name] = f"{prefix}{len(mapping)}"
    return mapping


def canonical_rename(t: Term) -> Term:
    """Rename variables to v0, v1, ... in first-occurrence order."""
    return rename(t, canonical_mapping(t))


def canonical_pair(lhs: Term, rhs: Term) -> Tuple[Term, Term]:
    """Shared-variable canonical renaming of an equation, lhs read first."""
    m = canonical_mapping(lhs, rhs)
    return rename(lhs, m), rename(rhs, m)
