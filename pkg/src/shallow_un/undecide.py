"""Flattening shallow systems and deciding uniqueness of normal forms (UN=).

The decision runs on the flattened system: enumerate its ground normal
forms of height at most ``k = max(1, #constants)`` over the signature
extended with ``3 * alpha`` inert constants, and look for two distinct ones
that are equivalent.  Normal forms are produced lazily by size, and the
first equivalent pair in order of combined size is found through an index
rather than by testing all pairs (see ``_WitnessSearch``); exhausting the
set proves UN=.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .equiv import EquivEngine, verify_trace
from .errors import NotShallow
from .proof import ProofTrace, replay, rules_resolver
from .terms import App, Term, Var, subterms, variables
from .trs import DEFAULT_NF_CAP, NormalFormsBySize, Rule, Trs, extend_signature, is_normal_form


@dataclass
class FlatteningResult:
    flat_system: Trs
    constant_table: Dict[str, Term]
    origin: Trs

    @property
    def identity(self) -> bool:
        return not self.constant_table

    def unfold(self, t: Term) -> Term:
        """Replace introduced constants by the ground terms they abbreviate."""
        if isinstance(t, Var):
            return t
        if not t.args:
            return self.constant_table.get(t.fn, t)
        return App(t.fn, tuple(self.unfold(a) for a in t.args))


def _deep_ground(t: Term):
    """Positions (depth >= 1) of ground subterms of height >= 1 whose arguments are constants."""
    for p, s in subterms(t):
        if p and isinstance(s, App) and s.ground and s.height == 1:
            yield p, s


def _abbreviate(t: Term, target: Term, c: Term) -> Term:
    if t == target:
        return c
    if isinstance(t, Var) or not t.args or t.height <= target.height:
        return t
    return App(t.fn, tuple(_abbreviate(a, target, c) for a in t.args))


def flatten(trs: Trs) -> FlatteningResult:
    """Abbreviate deep ground subterms by fresh constants until every rule is flat.

    The innermost deep ground subterm ``t`` is replaced everywhere by a new
    constant ``c``, and a defining rule ``t -> c`` is appended.  When ``t``
    is reducible in the input system, ``c -> c`` is appended as well so that
    ``c`` is a normal form exactly when the term it stands for is one.
    """
    bad = [r for r in trs.rules if not r.shallow]
    if bad:
        raise NotShallow(f"rule {bad[0].id} ({bad[0]}) is not shallow")
    if trs.is_flat():
        return FlatteningResult(trs, {}, trs)
    sides = [[r.lhs, r.rhs] for r in trs.rules]
    taken = set(trs.signature) | set(trs.declared_vars) | set(trs.fresh)
    table: Dict[str, Term] = {}
    memo: Dict[Term, str] = {}
    defining: List[Tuple[Term, Term]] = []
    counter = 1

    def unfold(t):
        if isinstance(t, Var):
            return t
        if not t.args:
            return table.get(t.fn, t)
        return App(t.fn, tuple(unfold(a) for a in t.args))

    while True:
        target = None
        for pair in sides:
            for side in pair:
                for _p, s in _deep_ground(side):
                    target = s
                    break
                if target is not None:
                    break
            if target is not None:
                break
        if target is None:
            break
        name = memo.get(target)
        if name is None:
            while f"c{counter}" in taken:
                counter += 1
            name = f"c{counter}"
            taken.add(name)
            memo[target] = name
            table[name] = unfold(target)
            defining.append((target, App(name, ())))
        c = App(name, ())
        for pair in sides:
            for k in range(2):
                pair[k] = _abbreviate(pair[k], target, c)
    pairs = [(l, r) for l, r in sides]
    rules = [Rule(r.id, l, rr) for r, (l, rr) in zip(trs.rules, pairs)]
    next_id = max((r.id for r in trs.rules), default=-1) + 1
    for t, c in defining:
        rules.append(Rule(next_id, t, c))
        next_id += 1
    for name, original in table.items():
        if not is_normal_form(original, trs):
            c = App(name, ())
            rules.append(Rule(next_id, c, c))
            next_id += 1
    flat = Trs.from_rules(rules, trs.signature, trs.declared_vars, trs.fresh)
    return FlatteningResult(flat, table, trs)


# -- the decision ----------------------------------------------------------------------


@dataclass
class Witness:
    left: Term
    right: Term
    trace: ProofTrace


@dataclass
class UnVerdict:
    status: str  # "UN=" | "not-UN="
    bound_k: int
    nf_count: int
    relation_queries: int
    witness: Optional[Witness] = None
    flattening: Optional[FlatteningResult] = None
    fresh: Tuple[str, ...] = ()

    @property
    def un_eq(self) -> bool:
        return self.status == "UN="


def bound_k(flat: Trs) -> int:
    return max(1, len(flat.constants))


class _WitnessSearch:
    """Find the first related pair of distinct normal forms in schedule order.

    The schedule orders pairs by combined size, then by the size of the
    smaller term, then by position within the size layers.  For the first
    related pair ``(p, q)`` every pair of smaller combined size is
    unrelated, and all proper subterms of normal forms are normal forms, so
    two of the engine's four justifications remain possible:

    * ``p`` and ``q`` are both equivalent to one rule constant (this covers
      the via-constant case and root steps on an equation with a constant
      side), or
    * a root step on an equation ``u = v`` with application or variable
      sides, where every argument of ``p`` facing a constant of ``u`` is
      equivalent to that constant and the terms collected by each variable
      are identical (two distinct ones would be a smaller related pair).

    Decomposition cannot be the reason, as two distinct related arguments
    would again be a smaller pair.  Both remaining conditions are sound on
    their own, so indexing normal forms by them and keeping the earliest
    partner per key reproduces exactly the first pair of the schedule.
    """

    def __init__(self, engine: EquivEngine, constants: List[str]):
        self.engine = engine
        self.constants = [App(c, ()) for c in constants]
        self.queries = 0
        self.equiv_consts: Dict[Term, frozenset] = {}
        self.first_by_const: Dict[str, Tuple[Term, int, int]] = {}
        # each distinct equation side is matched once per term; its users are
        # (oriented equation, which side) pairs
        self.patterns: List[tuple] = []
        self.users: List[List[Tuple[int, int]]] = []
        self.by_root: Dict[str, List[int]] = {}
        self.var_patterns: List[int] = []
        self.shared: List[Tuple[str, ...]] = []
        index: Dict[Term, int] = {}
        for _eq, _d, u, v, _slots in engine.meta:
            if _is_const(u) or _is_const(v):
                continue
            k = len(self.shared)
            self.shared.append(tuple(sorted(set(variables(u)) & set(variables(v)))))
            for role, side in enumerate((u, v)):
                pi = index.get(side)
                if pi is None:
                    pi = index[side] = len(self.patterns)
                    self.patterns.append(_compile(side))
                    self.users.append([])
                    if isinstance(side, Var):
                        self.var_patterns.append(pi)
                    else:
                        self.by_root.setdefault(side.fn, []).append(pi)
                self.users[pi].append((k, role))
        self.first: List[Tuple[dict, dict]] = [({}, {}) for _ in self.shared]
        self.best = None  # (key, left term, right term)

    def _consts_of(self, t: Term) -> frozenset:
        found = []
        for c in self.constants:
            self.queries += 1
            if t == c or self.engine.related(t, c):
                found.append(c.fn)
        return frozenset(found)

    def _bind(self, pattern, t: Term) -> Optional[Dict[str, Term]]:
        var, nargs, specs = pattern
        if var is not None:
            return {var: t}
        if len(t.args) != nargs:
            return None
        sigma: Dict[str, Term] = {}
        for (is_var, name), arg in zip(specs, t.args):
            if is_var:
                if sigma.setdefault(name, arg) != arg:
                    return None
            elif name not in self.equiv_consts[arg]:
                return None
        return sigma

    def _offer(self, partner, t: Term, size: int, pos: int) -> None:
        w, wsize, wpos = partner
        key = (wsize + size, wsize, wpos, pos)
        if self.best is None or key < self.best[0]:
            self.best = (key, w, t)

    def add(self, t: Term, size: int, pos: int) -> None:
        """Register the normal form at position ``pos`` of the size-``size`` layer."""
        consts = self._consts_of(t)
        self.equiv_consts[t] = consts
        entry = (t, size, pos)
        for c in sorted(consts):
            first = self.first_by_const.setdefault(c, entry)
            if first is not entry:
                self._offer(first, t, size, pos)
        for pi in self.by_root.get(t.fn, []) + self.var_patterns:
            sigma = self._bind(self.patterns[pi], t)
            if sigma is None:
                continue
            for k, role in self.users[pi]:
                key = tuple(sigma[x] for x in self.shared[k])
                partner = self.first[k][1 - role].get(key)
                if partner is not None and partner[0] != t:
                    self._offer(partner, t, size, pos)
                self.first[k][role].setdefault(key, entry)


def _compile(side: Term) -> tuple:
    """(variable name or None, arity, ((is_var, name), ...)) for a flat side."""
    if isinstance(side, Var):
        return (side.name, 0, ())
    return (None, len(side.args), tuple((isinstance(a, Var), a.name if isinstance(a, Var) else a.fn)
                                        for a in side.args))


def _is_const(t: Term) -> bool:
    return isinstance(t, App) and not t.args


def decide_un(trs: Trs, cap: int = DEFAULT_NF_CAP, use_declared: bool = False,
              backend: Optional[str] = None) -> UnVerdict:
    """Decide UN= for a shallow system (flattening it first when needed)."""
    fr = flatten(trs)
    flat = fr.flat_system
    k = bound_k(flat)
    ext = extend_signature(flat)
    nfs = NormalFormsBySize(ext, k, cap=cap, use_declared=use_declared)
    engine = EquivEngine(flat, backend=backend)
    search = _WitnessSearch(engine, flat.constants)
    seen: List[Tuple[Term, int, int]] = []
    n = 1
    while True:
        for pos, t in enumerate(nfs.layer(n)):
            if engine.collapse is not None:
                seen.append((t, n, pos))
                if len(seen) == 2:
                    search._offer(seen[0], t, n, pos)
            else:
                search.add(t, n, pos)
        # every pair not yet seen has combined size at least n + 2
        if search.best is not None and search.best[0][0] <= n + 1:
            break
        if nfs.exhausted_from(n + 1):
            break
        n += 1
    if search.best is None:
        return UnVerdict("UN=", k, nfs.count, search.queries, None, fr, ext.fresh)
    _, x, y = search.best
    search.queries += 1
    if not engine.related(x, y):
        raise AssertionError(f"witness candidates {x} and {y} are not related")
    steps = engine.lowered_steps(x, y)
    w = Witness(x, y, ProofTrace((x, y), steps, lowered=True))
    _certify(w, flat, k)
    return UnVerdict("not-UN=", k, nfs.count, search.queries, w, fr, ext.fresh)


def _certify(w: Witness, flat: Trs, k: int) -> None:
    problems = []
    if w.left == w.right:
        problems.append("witness terms coincide")
    if not (is_normal_form(w.left, flat) and is_normal_form(w.right, flat)):
        problems.append("witness term is not a normal form")
    if max(w.left.height, w.right.height) > k:
        problems.append("witness exceeds the height bound")
    if not verify_trace(w.trace, flat):
        problems.append("witness trace does not replay")
    if problems:
        raise AssertionError("; ".join(problems))


# -- reporting ----------------------------------------------------------------------------


def _constants_in(t: Term) -> List[str]:
    return sorted({s.fn for _, s in subterms(t) if isinstance(s, App) and not s.args})


def witness_report(v: UnVerdict, fr: Optional[FlatteningResult] = None) -> dict:
    """A JSON-ready report of the verdict; ``text`` holds the human rendering."""
    fr = fr or v.flattening
    table = fr.constant_table if fr is not None else {}
    report = {"status": v.status, "k": v.bound_k, "nf_count": v.nf_count, "relation_queries": v.relation_queries}
    lines = []
    if v.witness is None:
        report["witness"] = None
        lines.append(f"UN=: no two distinct normal forms of height <= {v.bound_k} are equivalent")
        lines.append(f"  {v.nf_count} normal forms enumerated, {v.relation_queries} relation queries")
    else:
        w = v.witness
        used = sorted({c for t in (w.left, w.right) for c in _constants_in(t) if c in table})
        unfolded = [fr.unfold(w.left), fr.unfold(w.right)] if fr is not None else [w.left, w.right]
        report["witness"] = {
            "terms": [str(w.left), str(w.right)],
            "unfolded": [str(t) for t in unfolded],
            "constants": {c: str(table[c]) for c in used},
            "trace": w.trace.to_json(),
        }
        lines.append(f"NOT UN=: {w.left} =R {w.right}")
        if [str(t) for t in unfolded] != report["witness"]["terms"]:
            lines.append(f"  unfolded: {unfolded[0]} =R {unfolded[1]}")
        for c in used:
            lines.append(f"  {c} == {table[c]}")
        lines.append(f"  trace ({len(w.trace.steps)} steps):")
        lines.extend("    " + s for s in format_steps(w.trace, fr.flat_system if fr else None))
        lines.append(f"  k = {v.bound_k}, {v.nf_count} normal forms enumerated, {v.relation_queries} relation queries")
    report["text"] = "\n".join(lines)
    return report


def format_steps(trace: ProofTrace, trs: Optional[Trs] = None) -> List[str]:
    out = []
    if trs is not None and trace.lowered:
        seq = replay(trace.endpoints[0], trace.steps, rules_resolver(trs.rules))
    else:
        seq = None
    for i, s in enumerate(trace.steps):
        pos = ".".join(str(k + 1) for k in s.pos) or "root"
        arrow = "->" if s.dir == "lr" else "<-"
        line = f"{arrow} rule {s.eq} at {pos}"
        if seq is not None:
            line = f"{seq[i]} {arrow} {seq[i + 1]}   (rule {s.eq} at {pos})"
        out.append(line)
    return out
