"""Proof traces: positioned equation or rule applications, replay and checking."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import ShallowUNError
from .terms import (
    App,
    Position,
    Term,
    Var,
    apply_subst,
    replace_at,
    subterm_at,
    variables,
)

LR = "lr"
RL = "rl"


def flip(direction: str) -> str:
    return RL if direction == LR else LR


@dataclass(frozen=True)
class Step:
    """Apply equation/rule ``eq`` at ``pos``.

    ``lr`` rewrites an instance of the left side into the right side, ``rl``
    the converse.  ``subst`` instantiates the variables of the equation.
    """

    pos: Position
    eq: int
    dir: str
    subst: Dict[str, Term] = field(default_factory=dict, compare=True, hash=False)

    def reversed(self) -> "Step":
        return Step(self.pos, self.eq, flip(self.dir), self.subst)

    def shifted(self, prefix: Position) -> "Step":
        return Step(tuple(prefix) + self.pos, self.eq, self.dir, self.subst)

    def to_json(self) -> dict:
        return {
            "pos": list(self.pos),
            "eq": self.eq,
            "dir": self.dir,
            "subst": {k: str(v) for k, v in sorted(self.subst.items())},
        }


def reverse_steps(steps: Sequence[Step]) -> List[Step]:
    return [s.reversed() for s in reversed(steps)]


@dataclass
class ProofTrace:
    endpoints: Tuple[Term, Term]
    steps: List[Step]
    lowered: bool = False

    def __len__(self):
        return len(self.steps)

    def reversed(self) -> "ProofTrace":
        return ProofTrace((self.endpoints[1], self.endpoints[0]), reverse_steps(self.steps), self.lowered)

    def variable_names(self) -> List[str]:
        names: Dict[str, None] = {}
        for t in self.endpoints:
            for v in variables(t):
                names.setdefault(v, None)
        for s in self.steps:
            for t in s.subst.values():
                for v in variables(t):
                    names.setdefault(v, None)
        return sorted(names)

    def to_json(self) -> dict:
        return {
            "endpoints": [str(self.endpoints[0]), str(self.endpoints[1])],
            "steps": [s.to_json() for s in self.steps],
            "lowered": self.lowered,
            "vars": self.variable_names(),
        }


# resolver: equation id -> (lhs, rhs), or None when unknown
Resolver = Callable[[int], Optional[Tuple[Term, Term]]]


class ReplayError(ShallowUNError):
    code = "bad-trace"


def apply_step(t: Term, step: Step, resolve: Resolver) -> Term:
    sides = resolve(step.eq)
    if sides is None:
        raise ReplayError(f"unknown equation id {step.eq}")
    lhs, rhs = sides
    src, dst = (lhs, rhs) if step.dir == LR else (rhs, lhs)
    if step.dir not in (LR, RL):
        raise ReplayError(f"bad direction {step.dir!r}")
    try:
        here = subterm_at(t, step.pos)
    except ShallowUNError as exc:
        raise ReplayError(str(exc)) from exc
    if apply_subst(src, step.subst) != here:
        raise ReplayError(f"step {step.eq}/{step.dir} does not apply at {list(step.pos)} of {t}")
    return replace_at(t, step.pos, apply_subst(dst, step.subst))


def replay(start: Term, steps: Sequence[Step], resolve: Resolver) -> List[Term]:
    """The term sequence visited by ``steps``; raises ReplayError on a bad step."""
    seq = [start]
    for s in steps:
        seq.append(apply_step(seq[-1], s, resolve))
    return seq


def check_trace(trace: ProofTrace, resolve: Resolver) -> bool:
    try:
        seq = replay(trace.endpoints[0], trace.steps, resolve)
    except ReplayError:
        return False
    return seq[-1] == trace.endpoints[1]


def drop_cycles(start: Term, steps: Sequence[Step], resolve: Resolver) -> List[Step]:
    """Remove detours: whenever a term repeats, cut the steps between its visits."""
    seq = replay(start, steps, resolve)
    last: Dict[Term, int] = {t: i for i, t in enumerate(seq)}
    out: List[Step] = []
    i = 0
    while i < len(steps):
        j = last[seq[i]]
        if j > i:
            i = j
            continue
        out.append(steps[i])
        i += 1
    return out


def rules_resolver(rules) -> Resolver:
    table = {r.id: (r.lhs, r.rhs) for r in rules}
    return table.get


def restore_constants(t: Term, back: Dict[str, str]) -> Term:
    """Turn the placeholder constants named in ``back`` into variables."""
    if isinstance(t, Var):
        return t
    if not t.args:
        name = back.get(t.fn)
        return Var(name) if name is not None else t
    return App(t.fn, tuple(restore_constants(a, back) for a in t.args))
