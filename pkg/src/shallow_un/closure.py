"""Equational closure of a flat rewrite system.

``to_equations`` turns rules into equations and ``saturate`` closes them
under three inference rules:

1. from ``g = d`` and ``l = r`` with ``g``, ``l`` non-variables and
   ``s = mgu(g, l)``, infer ``d s = r s``;
2. from ``x = d`` (``x`` a constant or variable) and ``y = r`` (``y`` a
   variable), infer ``d = r{y := x}``;
3. from ``g[a] = d`` and ``a = b`` (``a``, ``b`` constants), infer
   ``g[b] = d`` for each occurrence of ``a`` in ``g``.

Overlaps of rule (1) on a bare constant are not taken: such a conclusion
only ever links two terms that are both equivalent to that constant, and the
decision engine in :mod:`shallow_un.equiv` closes those links itself (see
its module docstring).  This keeps the closure small and matches the
equation set one computes by hand on small examples.

Every derived equation stores a *recipe*: a list of steps over its parent
equations leading from its left-hand side to its right-hand side.  Recipes
let any closure-level step be lowered to a sequence of steps that only use
the original rules.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import CapExceeded, NotFlat, UnknownEquation
from .proof import LR, RL, Step, drop_cycles, reverse_steps, rules_resolver
from .terms import (
    App,
    Position,
    Term,
    Var,
    apply_subst,
    canonical_mapping,
    is_flat,
    positions,
    rename,
    replace_at,
    subterm_at,
    subterms,
    term_key,
    unify,
    variables,
)
from .trs import Trs

DEFAULT_EQ_CAP = 100_000

FROM_RULE = "rule"
RULE1 = "mgu"
RULE2 = "var"
RULE3 = "const"


@dataclass(frozen=True)
class Provenance:
    kind: str
    parents: Tuple[int, ...] = ()
    detail: str = ""

    def __str__(self):
        if self.kind == FROM_RULE:
            return f"rule {self.parents[0]}"
        label = {RULE1: "(1)", RULE2: "(2)", RULE3: "(3)"}[self.kind]
        text = f"{label} from {','.join(str(p) for p in self.parents)}"
        return f"{text} {self.detail}" if self.detail else text


@dataclass
class Equation:
    id: int
    lhs: Term
    rhs: Term
    provenance: Provenance
    # from-rule equations: canonical variable -> rule variable
    rule_vars: Dict[str, str] = field(default_factory=dict)
    # derived equations: steps over parent equations from lhs to rhs
    recipe: List[Step] = field(default_factory=list)

    @property
    def trivial(self) -> bool:
        return self.lhs == self.rhs

    def key(self):
        return equation_key(self.lhs, self.rhs)

    def orientations(self):
        """(source side, target side, direction) for both readings."""
        yield self.lhs, self.rhs, LR
        yield self.rhs, self.lhs, RL

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


def _canon(lhs: Term, rhs: Term):
    m = canonical_mapping(lhs, rhs)
    return rename(lhs, m), rename(rhs, m), m


def equation_key(lhs: Term, rhs: Term):
    """Identity of an equation up to variable renaming and orientation."""
    a = _canon(lhs, rhs)[:2]
    b = _canon(rhs, lhs)[:2]
    ka = (term_key(a[0]), term_key(a[1]))
    kb = (term_key(b[0]), term_key(b[1]))
    return min(ka, kb)


class EquationSet:
    """Equations with stable ids, deduplicated modulo renaming and orientation."""

    def __init__(self, equations: Iterable[Equation] = ()):
        self.equations: Dict[int, Equation] = {}
        self._keys: Dict[tuple, int] = {}
        for e in equations:
            self._insert(e)

    def _insert(self, e: Equation) -> bool:
        k = e.key()
        if k in self._keys:
            return False
        self._keys[k] = e.id
        self.equations[e.id] = e
        return True

    def __iter__(self):
        return iter(self.equations.values())

    def __len__(self):
        return len(self.equations)

    def __contains__(self, pair) -> bool:
        return equation_key(*pair) in self._keys

    def __getitem__(self, eq_id: int) -> Equation:
        try:
            return self.equations[eq_id]
        except KeyError:
            raise UnknownEquation(f"no equation with id {eq_id}") from None

    def find(self, lhs: Term, rhs: Term) -> Optional[Equation]:
        i = self._keys.get(equation_key(lhs, rhs))
        return None if i is None else self.equations[i]

    def keys(self) -> set:
        return set(self._keys)

    def nontrivial(self) -> List[Equation]:
        return [e for e in self if not e.trivial]

    def resolve(self, eq_id: int):
        e = self.equations.get(eq_id)
        return None if e is None else (e.lhs, e.rhs)

    def next_id(self) -> int:
        return max(self.equations, default=-1) + 1


def to_equations(trs: Trs) -> EquationSet:
    """One canonical equation per rule; the equation id is the rule id.

    A rule whose equation repeats an earlier one (modulo renaming and
    orientation) is represented by the earlier equation.
    """
    out = EquationSet()
    for r in trs.rules:
        m = canonical_mapping(r.lhs, r.rhs)
        back = {v: k for k, v in m.items()}
        e = Equation(r.id, rename(r.lhs, m), rename(r.rhs, m), Provenance(FROM_RULE, (r.id,)), rule_vars=back)
        out._insert(e)
    return out


# -- saturation --------------------------------------------------------------------


def _apart(t: Term, prefix: str) -> Term:
    return rename(t, {v: prefix + v[1:] for v in variables(t)})


def _apart_subst(eq: Equation, prefix: str) -> Dict[str, Term]:
    """Substitution instantiating eq's canonical variables by their renamed-apart copies."""
    return {v: Var(prefix + v[1:]) for v in variables(eq.lhs) + variables(eq.rhs)}


def _constant(t: Term) -> bool:
    return isinstance(t, App) and not t.args


def _collapsing(e: Equation) -> bool:
    """One side is a variable missing from the other side, so every term is equal."""
    return any(isinstance(u, Var) and u.name not in variables(v) for u, v, _ in e.orientations())


def _constants_in(t: Term):
    return {s.fn for _, s in subterms(t) if isinstance(s, App) and not s.args}


class _Saturator:
    """Worklist saturation; partners for each new equation come from indexes.

    An equation can only take part in an inference with another one if the
    indexes below put them together, so visiting indexed partners in
    processing order derives exactly what the all-pairs loop would.
    """

    def __init__(self, base: EquationSet, cap: int, stop_on_collapse: bool = False):
        self.cap = cap
        self.stop_on_collapse = stop_on_collapse
        self.collapsed = False
        self.result = EquationSet()
        self.queue: deque = deque()
        for e in base:
            if not e.trivial:
                self.result._insert(e)
                self.queue.append(e)
        self.next_id = base.next_id()
        self.processed: List[Equation] = []
        self._order: Dict[int, int] = {}
        self._by_root: Dict[tuple, List[int]] = {}
        self._var_side: List[int] = []
        self._leaf_side: List[int] = []
        self._const_eqs: Dict[str, List[int]] = {}
        self._by_const: Dict[str, List[int]] = {}
        self._apart_cache: Dict[tuple, tuple] = {}

    def add(self, lhs: Term, rhs: Term, prov: Provenance, steps: List[Step]) -> None:
        if lhs == rhs:
            return
        cl, cr, m = _canon(lhs, rhs)
        if cl == cr:
            return
        if (cl, cr) in self.result:
            return
        # express recipe substitutions over the canonical variables
        sub = {k: Var(v) for k, v in m.items()}
        recipe = [Step(s.pos, s.eq, s.dir, {k: apply_subst(t, sub) for k, t in s.subst.items()}) for s in steps]
        e = Equation(self.next_id, cl, cr, prov, recipe=recipe)
        self.next_id += 1
        self.result._insert(e)
        self.queue.append(e)
        if len(self.result) > self.cap:
            raise CapExceeded(f"closure exceeded {self.cap} equations", partial_count=len(self.result))

    def _index(self, e: Equation) -> None:
        k = len(self.processed)
        self.processed.append(e)
        self._order[e.id] = k
        sides = (e.lhs, e.rhs)
        for t in sides:
            if isinstance(t, App) and t.args:
                self._by_root.setdefault((t.fn, len(t.args)), []).append(k)
        if any(isinstance(t, Var) for t in sides):
            self._var_side.append(k)
        if any(isinstance(t, Var) or _constant(t) for t in sides):
            self._leaf_side.append(k)
        if _constant(e.lhs) and _constant(e.rhs):
            for c in {e.lhs.fn, e.rhs.fn}:
                self._const_eqs.setdefault(c, []).append(k)
        for c in _constants_in(e.lhs) | _constants_in(e.rhs):
            self._by_const.setdefault(c, []).append(k)

    def _partners(self, e: Equation) -> List[int]:
        found = set()
        sides = (e.lhs, e.rhs)
        for t in sides:
            if isinstance(t, App) and t.args:
                found.update(self._by_root.get((t.fn, len(t.args)), ()))
        if any(isinstance(t, Var) for t in sides):
            found.update(self._leaf_side)
        if any(isinstance(t, Var) or _constant(t) for t in sides):
            found.update(self._var_side)
        consts = _constants_in(e.lhs) | _constants_in(e.rhs)
        for c in consts:
            found.update(self._const_eqs.get(c, ()))
        if _constant(e.lhs) and _constant(e.rhs):
            for c in {e.lhs.fn, e.rhs.fn}:
                found.update(self._by_const.get(c, ()))
        return sorted(found)

    def run(self) -> EquationSet:
        while self.queue:
            e = self.queue.popleft()
            if self.stop_on_collapse and _collapsing(e):
                self.collapsed = True
                break
            self._index(e)
            me = len(self.processed) - 1
            for k in self._partners(e):
                other = self.processed[k]
                self.combine(e, other)
                if k != me:
                    self.combine(other, e)
        return self.result

    def _apart(self, e: Equation, prefix: str):
        key = (e.id, prefix)
        got = self._apart_cache.get(key)
        if got is None:
            sub = _apart_subst(e, prefix)
            sides = [(apply_subst(u, sub), apply_subst(v, sub), d) for u, v, d in e.orientations()]
            got = self._apart_cache[key] = (sub, sides)
        return got

    def combine(self, e1: Equation, e2: Equation) -> None:
        s1, sides1 = self._apart(e1, "p")
        s2, sides2 = self._apart(e2, "q")
        for g, d, dir1 in sides1:
            for l, r, dir2 in sides2:
                self.rule1(e1, e2, g, d, dir1, s1, l, r, dir2, s2)
                self.rule2(e1, e2, g, d, dir1, s1, l, r, dir2, s2)
                self.rule3(e1, e2, g, d, dir1, s1, l, r, dir2, s2)

    def rule1(self, e1, e2, g, d, dir1, s1, l, r, dir2, s2):
        if isinstance(g, Var) or isinstance(l, Var) or _constant(g):
            return
        if g.fn != l.fn or len(g.args) != len(l.args):
            return
        for u, v in zip(g.args, l.args):
            if isinstance(u, App) and isinstance(v, App) and u.fn != v.fn:
                return
        sigma = unify(g, l)
        if sigma is None:
            return
        lhs, rhs = apply_subst(d, sigma), apply_subst(r, sigma)
        steps = [
            Step((), e1.id, RL if dir1 == LR else LR, _compose(s1, sigma)),
            Step((), e2.id, dir2, _compose(s2, sigma)),
        ]
        self.add(lhs, rhs, Provenance(RULE1, (e1.id, e2.id)), steps)

    def rule2(self, e1, e2, x, d, dir1, s1, y, r, dir2, s2):
        if not (isinstance(x, Var) or _constant(x)) or not isinstance(y, Var):
            return
        bind = {y.name: x}
        lhs, rhs = d, apply_subst(r, bind)
        steps = [
            Step((), e1.id, RL if dir1 == LR else LR, s1),
            Step((), e2.id, dir2, _compose(s2, bind)),
        ]
        self.add(lhs, rhs, Provenance(RULE2, (e1.id, e2.id)), steps)

    def rule3(self, e1, e2, g, d, dir1, s1, a, b, dir2, s2):
        if not (_constant(a) and _constant(b)) or isinstance(g, Var):
            return
        for p in positions(g):
            if subterm_at(g, p) != a:
                continue
            lhs = replace_at(g, p, b)
            steps = [
                Step(p, e2.id, RL if dir2 == LR else LR, {}),
                Step((), e1.id, dir1, s1),
            ]
            self.add(lhs, d, Provenance(RULE3, (e1.id, e2.id), f"at {list(p)}"), steps)


def _compose(base: Dict[str, Term], sigma: Dict[str, Term]) -> Dict[str, Term]:
    return {k: apply_subst(v, sigma) for k, v in base.items()}


def saturate(eqs: EquationSet, cap: int = DEFAULT_EQ_CAP, stop_on_collapse: bool = False) -> EquationSet:
    """Close ``eqs`` under the three inference rules; trivial equations are dropped.

    With ``stop_on_collapse`` the run ends as soon as a collapsing equation
    (a variable side not occurring on the other side) is taken from the
    queue.  The result then contains that equation but is not closed; the
    theory it describes relates every pair of terms anyway.
    """
    for e in eqs:
        if not (is_flat(e.lhs) and is_flat(e.rhs)):
            raise NotFlat(f"equation {e.id} ({e}) is not flat")
    return _Saturator(eqs, cap, stop_on_collapse).run()


def closure_of(trs: Trs, cap: int = DEFAULT_EQ_CAP, stop_on_collapse: bool = False) -> EquationSet:
    if not trs.is_flat():
        bad = next(r for r in trs.rules if not r.flat)
        raise NotFlat(f"rule {bad.id} ({bad}) is not flat")
    return saturate(to_equations(trs), cap, stop_on_collapse)


# -- lowering to rule steps ----------------------------------------------------------------


class Lowerer:
    """Expands closure-level steps into steps over the original rules."""

    def __init__(self, eqs: EquationSet, trs: Trs):
        self.eqs = eqs
        self.trs = trs
        self._fresh = 0
        self._taken = {v for r in trs.rules for v in variables(r.lhs) + variables(r.rhs)}

    def fresh_var(self) -> Var:
        while True:
            name = f"_w{self._fresh}"
            self._fresh += 1
            if name not in self._taken:
                return Var(name)

    def expand(self, step: Step) -> List[Step]:
        out: List[Step] = []
        self._expand(step.eq, step.dir, step.subst, tuple(step.pos), out)
        return out

    def _expand(self, eq_id: int, direction: str, subst: Dict[str, Term], pos: Position, out: List[Step]) -> None:
        e = self.eqs[eq_id]
        if e.provenance.kind == FROM_RULE:
            rule_subst = {}
            for canon, rv in e.rule_vars.items():
                rule_subst[rv] = subst.get(canon, Var(canon))
            out.append(Step(pos, e.provenance.parents[0], direction, rule_subst))
            return
        own = set(variables(e.lhs) + variables(e.rhs))
        full = dict(subst)
        for v in own:
            full.setdefault(v, Var(v))
        steps = e.recipe if direction == LR else reverse_steps(e.recipe)
        extra: Dict[str, Term] = {}
        for s in steps:
            for t in s.subst.values():
                for v in variables(t):
                    if v not in full and v not in extra:
                        extra[v] = self.fresh_var()
        full.update(extra)
        for s in steps:
            inner = {k: apply_subst(t, full) for k, t in s.subst.items()}
            self._expand(s.eq, s.dir, inner, pos + tuple(s.pos), out)

    def lower_steps(self, start: Term, steps: Sequence[Step]) -> List[Step]:
        out: List[Step] = []
        for s in steps:
            out.extend(self.expand(s))
        return drop_cycles(start, out, rules_resolver(self.trs.rules))


def expand_step(eq: Equation, sigma: Dict[str, Term], position: Position, eqs: EquationSet, trs: Trs) -> List[Step]:
    """Original-rule steps realizing one left-to-right application of ``eq``."""
    if eq.id not in eqs.equations:
        raise UnknownEquation(f"equation {eq} is not part of the closure")
    return Lowerer(eqs, trs).expand(Step(tuple(position), eq.id, LR, dict(sigma)))


def format_closure(eqs: EquationSet) -> str:
    lines = []
    for e in sorted(eqs, key=lambda e: e.id):
        lines.append(f"{e.lhs} = {e.rhs}  # {e.provenance}")
    return "\n".join(lines)
