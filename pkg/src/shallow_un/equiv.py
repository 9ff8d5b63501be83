"""Deciding s <->* t for flat systems, with proof traces; plus a bounded search oracle.

Decision procedure
------------------
Let E be the closure of the system's equations (:mod:`shallow_un.closure`).
Over E, any proof between two terms can be rearranged so that at most one
step happens at the root.  So ``p`` and ``q`` are equivalent exactly when
one of the following holds, where every premise is a pair of strictly
smaller total size:

* **refl**: ``p == q``;
* **decompose**: same root symbol, arguments pairwise equivalent;
* **root step**: for some equation ``u = v`` of E (either orientation),
  ``p`` lies below ``u`` and ``q`` below ``v`` up to equivalence of the
  arguments.  A constant argument of ``u`` demands that the matching
  argument of ``p`` is equivalent to it; variable arguments collect the
  terms they must stand for into classes, and each class has to be
  pairwise equivalent.  Binding each variable to the first member of its
  class is enough, because equivalence is transitive;
* **via constant**: ``p ~ c`` and ``c ~ q`` for a constant ``c`` of the
  system (both ``p`` and ``q`` non-constants).  This covers the closure
  equations whose two sides meet only in a constant, which the closure does
  not materialise.

One degenerate case is handled up front: if some closure equation has a
variable side that does not occur on the other side (``a = y``, say), every
term is equivalent to every other and the relation is total.  Overlaps on a
constant can only lose an equation with a bare-variable side when such an
equation is already present, so this check and the via-constant rule
together make up for the overlaps the closure skips.

Query variables are replaced by fresh constants that no rule mentions, so
the relation is computed on ground terms and memoised per pair; the
recursion is well founded on total size and needs no fixpoint iteration.
Completeness is not proved here; the test-suite checks the procedure
against the bounded search in :func:`oracle_equiv` on random systems.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .closure import EquationSet, Lowerer, closure_of
from .errors import NotFlat
from .kernel import kernel_class
from .proof import LR, RL, ProofTrace, Step, check_trace, flip, restore_constants, reverse_steps, rules_resolver
from .terms import App, Term, Var, apply_subst, subterms, term_key, variables
from .trs import Trs, one_step_successors

REFL, DEC, ROOT, VIA = 0, 1, 2, 3


@dataclass
class EquivResult:
    status: str  # "equivalent" | "not-equivalent" | "unknown"
    trace: Optional[ProofTrace] = None
    closure_trace: Optional[ProofTrace] = None
    method: str = "decide"
    stats: Dict[str, int] = field(default_factory=dict)

    @property
    def equivalent(self) -> bool:
        return self.status == "equivalent"

    def to_json(self) -> dict:
        out = {"status": self.status, "method": self.method}
        out["trace"] = self.trace.to_json() if self.trace is not None else None
        if self.closure_trace is not None:
            out["closure_steps"] = len(self.closure_trace.steps)
        if self.stats:
            out["stats"] = dict(sorted(self.stats.items()))
        return out


def placeholder_names(names: Sequence[str], taken) -> Dict[str, str]:
    """Map variable names to reserved constant names ``_v<name>`` not in ``taken``."""
    taken = set(taken)
    out = {}
    for n in names:
        cand = f"_v{n}"
        while cand in taken:
            cand = "_" + cand
        taken.add(cand)
        out[n] = cand
    return out


def ground_with(t: Term, table: Dict[str, str]) -> Term:
    return apply_subst(t, {v: App(c, ()) for v, c in table.items()})


class EquivEngine:
    """Memoised pair relation for one flat system.

    The engine can be shared between many queries on the same system; terms
    are interned on first use and results never depend on the query.
    """

    def __init__(self, trs: Trs, eqs: Optional[EquationSet] = None, backend: Optional[str] = None):
        if not trs.is_flat():
            bad = next(r for r in trs.rules if not r.flat)
            raise NotFlat(f"rule {bad.id} ({bad}) is not flat; flatten the system first")
        self.trs = trs
        self.eqs = eqs if eqs is not None else closure_of(trs, stop_on_collapse=True)
        self.lowerer = Lowerer(self.eqs, trs)
        self._syms: Dict[Tuple[str, int], int] = {}
        self._ids: Dict[Term, int] = {}
        self._terms: List[Term] = []
        self._pending: List[Term] = []
        self._trace_memo: Dict[Tuple[int, int], List[Step]] = {}

        self.meta = []  # (eq id, direction, u, v, slot names)
        oriented = []
        for e in sorted(self.eqs.nontrivial(), key=lambda e: e.id):
            slots = list(dict.fromkeys(variables(e.lhs) + variables(e.rhs)))
            index = {v: k for k, v in enumerate(slots)}
            for u, v, d in e.orientations():
                oriented.append((self._encode(u, index), self._encode(v, index), len(slots)))
                self.meta.append((e.id, d, u, v, slots))
        self.collapse = None  # (eq id, direction from the lone variable, variable, other vars)
        for e in sorted(self.eqs.nontrivial(), key=lambda e: e.id):
            for u, v, d in e.orientations():
                if isinstance(u, Var) and u.name not in variables(v):
                    self.collapse = (e.id, d, u.name, variables(v))
                    break
            if self.collapse:
                break
        const_terms = sorted({App(c, ()) for c in trs.constants}, key=term_key)
        const_ids = [self._reserve(c) for c in const_terms]
        self.kernel = kernel_class(backend)(oriented, const_ids)
        self.backend = self.kernel.backend
        self._flush()

    # -- interning -------------------------------------------------------

    def _sym(self, fn: str, arity: int) -> int:
        key = (fn, arity)
        s = self._syms.get(key)
        if s is None:
            s = self._syms[key] = len(self._syms)
        return s

    def _reserve(self, t: Term) -> int:
        """Assign an id to a ground term before the kernel exists."""
        tid = self._ids.get(t)
        if tid is not None:
            return tid
        for a in t.args:
            self._reserve(a)
        tid = len(self._terms)
        self._ids[t] = tid
        self._terms.append(t)
        self._pending.append(t)
        return tid

    def _flush(self):
        for t in self._pending:
            got = self.kernel.add_term(self._sym(t.fn, len(t.args)), tuple(self._ids[a] for a in t.args), t.size)
            assert got == self._ids[t]
        self._pending = []

    def intern(self, t: Term) -> int:
        if not (isinstance(t, App) and t.ground):
            raise ValueError(f"only ground terms can be interned, got {t}")
        tid = self._ids.get(t)
        if tid is None:
            tid = self._reserve(t)
            self._flush()
        return tid

    def term(self, tid: int) -> Term:
        return self._terms[tid]

    def _encode(self, side: Term, index: Dict[str, int]):
        if isinstance(side, Var):
            return (1, index[side.name], ())
        if not side.args:
            return (0, self._reserve(side), ())
        enc = []
        for a in side.args:
            if isinstance(a, Var):
                enc.append((1, index[a.name]))
            else:
                enc.append((0, self._reserve(a)))
        return (2, self._sym(side.fn, len(side.args)), tuple(enc))

    # -- queries ---------------------------------------------------------

    def related(self, s: Term, t: Term) -> bool:
        return self.related_ids(self.intern(s), self.intern(t))

    def related_ids(self, i: int, j: int) -> bool:
        if self.collapse is not None:
            return True
        return self.kernel.related(i, j)

    def closure_steps(self, s: Term, t: Term) -> List[Step]:
        """Closure-level steps from s to t; the pair must be related."""
        return list(self._trace(self.intern(s), self.intern(t)))

    def lowered_steps(self, s: Term, t: Term) -> List[Step]:
        return self.lowerer.lower_steps(s, self.closure_steps(s, t))

    def _trace(self, i: int, j: int) -> List[Step]:
        if i == j:
            return []
        if i > j:
            return reverse_steps(self._trace(j, i))
        memo = self._trace_memo.get((i, j))
        if memo is not None:
            return memo
        if self.collapse is not None:
            # p -> v{y:=p} <- q with the remaining variables bound to p on both sides
            eq_id, d, y, rest = self.collapse
            p, q = self.term(i), self.term(j)
            fill = {z: p for z in rest}
            steps = [Step((), eq_id, d, {**fill, y: p}), Step((), eq_id, flip(d), {**fill, y: q})]
            self._trace_memo[(i, j)] = steps
            return steps
        just = self.kernel.justification(i, j)
        if just is None:
            raise ValueError(f"{self.term(i)} and {self.term(j)} are not related")
        kind, payload = just
        p, q = self.term(i), self.term(j)
        steps: List[Step] = []
        if kind == DEC:
            for k, (a, b) in enumerate(zip(p.args, q.args)):
                steps.extend(s.shifted((k,)) for s in self._trace(self._ids[a], self._ids[b]))
        elif kind == VIA:
            steps = self._trace(i, payload) + self._trace(payload, j)
        elif kind == ROOT:
            eq_id, d, u, v, slots = self.meta[payload]
            classes: Dict[str, List[Term]] = {}
            _collect(u, p, classes)
            _collect(v, q, classes)
            sigma = {x: members[0] for x, members in classes.items()}
            steps = self._side_steps(u, p, sigma)
            steps.append(Step((), eq_id, d, dict(sorted(sigma.items()))))
            steps.extend(reverse_steps(self._side_steps(v, q, sigma)))
        else:
            raise AssertionError(f"unexpected justification {just}")
        self._trace_memo[(i, j)] = steps
        return steps

    def _side_steps(self, side: Term, t: Term, sigma: Dict[str, Term]) -> List[Step]:
        """Steps from t to side·sigma (which only differ below the root)."""
        if isinstance(side, Var):
            return self._trace(self._ids[t], self._ids[sigma[side.name]])
        out: List[Step] = []
        for k, (pat, arg) in enumerate(zip(side.args, t.args)):
            target = sigma[pat.name] if isinstance(pat, Var) else pat
            out.extend(s.shifted((k,)) for s in self._trace(self._ids[arg], self._ids[target]))
        return out


def _collect(side: Term, t: Term, classes: Dict[str, List[Term]]) -> None:
    if isinstance(side, Var):
        classes.setdefault(side.name, []).append(t)
        return
    for pat, arg in zip(side.args, t.args):
        if isinstance(pat, Var):
            classes.setdefault(pat.name, []).append(arg)


def decide_equiv(s: Term, t: Term, trs: Trs, engine: Optional[EquivEngine] = None,
                 backend: Optional[str] = None) -> EquivResult:
    """Decide s <->* t for a flat system; on success return a lowered, replayable trace."""
    if engine is None:
        engine = EquivEngine(trs, backend=backend)
    names = list(dict.fromkeys(variables(s) + variables(t)))
    taken = set(trs.signature) | set(trs.fresh) | {n for n, _ in engine._syms}
    table = placeholder_names(names, taken)
    gs, gt = ground_with(s, table), ground_with(t, table)
    if not engine.related(gs, gt):
        return EquivResult("not-equivalent", method="decide", stats={"terms": len(engine._terms)})
    csteps = engine.closure_steps(gs, gt)
    lowered = engine.lowerer.lower_steps(gs, csteps)
    back = {c: v for v, c in table.items()}
    return EquivResult(
        "equivalent",
        trace=ProofTrace((s, t), [_restore_step(st, back) for st in lowered], lowered=True),
        closure_trace=ProofTrace((s, t), [_restore_step(st, back) for st in csteps], lowered=False),
        method="decide",
        stats={"terms": len(engine._terms)},
    )


def _restore_step(step: Step, back: Dict[str, str]) -> Step:
    if not back:
        return step
    return Step(step.pos, step.eq, step.dir, {k: restore_constants(v, back) for k, v in step.subst.items()})


# -- brute-force oracle -----------------------------------------------------------


def oracle_equiv(s: Term, t: Term, trs: Trs, size_cap: int = 12, step_cap: int = 8,
                 node_budget: int = 20_000, pool_size: int = 3, pool_limit: int = 24) -> EquivResult:
    """Bidirectional breadth-first search over the symmetric rewrite graph.

    Only terms of size <= ``size_cap`` are visited and proofs are at most
    ``step_cap`` steps long.  Variables that a reversed rule introduces are
    instantiated from a pool made of the signature's constants plus the
    ground subterms met so far (of size <= ``pool_size``, at most
    ``pool_limit`` of them).  The answer is "equivalent" with a rule-level
    trace, or "unknown"; the search never claims inequivalence.
    """
    if s == t:
        return EquivResult("equivalent", ProofTrace((s, t), [], lowered=True), method="oracle")
    pool: Dict[Term, None] = {}
    for name, arity in trs.enumeration_symbols(use_declared=True).items():
        if arity == 0:
            pool.setdefault(App(name, ()), None)

    def feed(term):
        if len(pool) >= pool_limit:
            return
        for _, sub in subterms(term):
            if isinstance(sub, App) and sub.ground and sub.size <= pool_size and sub not in pool:
                pool[sub] = None
                if len(pool) >= pool_limit:
                    return

    feed(s)
    feed(t)
    parents = ({s: None}, {t: None})
    frontiers = ([s], [t])
    depths = [0, 0]
    visited = 2
    while frontiers[0] and frontiers[1] and depths[0] + depths[1] < step_cap:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        mine, other = parents[side], parents[1 - side]
        nxt = []
        pool_now = sorted(pool, key=term_key)
        for u in frontiers[side]:
            for w, step in one_step_successors(u, trs, "symmetric", pool_now, max_size=size_cap):
                if w in mine:
                    continue
                mine[w] = (u, step)
                visited += 1
                if w in other:
                    steps = _join(w, parents[0], parents[1])
                    return EquivResult("equivalent", ProofTrace((s, t), steps, lowered=True),
                                       method="oracle", stats={"visited": visited})
                nxt.append(w)
                feed(w)
                if visited > node_budget:
                    return EquivResult("unknown", method="oracle", stats={"visited": visited})
        frontiers = (nxt, frontiers[1]) if side == 0 else (frontiers[0], nxt)
        depths[side] += 1
    return EquivResult("unknown", method="oracle", stats={"visited": visited})


def _join(meet: Term, from_s: dict, from_t: dict) -> List[Step]:
    left: List[Step] = []
    cur = meet
    while from_s[cur] is not None:
        prev, step = from_s[cur]
        left.append(step)
        cur = prev
    left.reverse()
    right: List[Step] = []
    cur = meet
    while from_t[cur] is not None:
        prev, step = from_t[cur]
        right.append(step.reversed())
        cur = prev
    return left + right


def verify_trace(trace: ProofTrace, trs: Trs, eqs: Optional[EquationSet] = None) -> bool:
    """Replay a trace; lowered traces use the rules, others the closure equations."""
    if trace.lowered:
        return check_trace(trace, rules_resolver(trs.rules))
    if eqs is None:
        eqs = closure_of(trs)
    return check_trace(trace, eqs.resolve)
