"""Concrete syntax for terms and rewrite-system files.

A system file holds, one per line and in any order before the rules:

    sig f/2 g/1 a/0      # optional arity declarations
    vars x y             # identifiers that denote variables
    fresh k0 k1          # optional extra constants for enumeration
    rule: f(x,x) -> c    # the "rule:" prefix is optional
    a -> h(b)

``#`` starts a comment.  Undeclared identifiers are function symbols whose
arity is fixed by their first use.  ``print_trs`` writes the canonical form
of a system, which ``parse_trs`` reads back to the same value.
"""

from __future__ import annotations

import re
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import ArityConflict, ParseError, VariableAsLhs
from .terms import App, Term, Var
from .trs import Rule, Trs

IDENT = re.compile(r"[\w∅][\w'∅]*")
ARROW = re.compile(r"->|→")


class _Reader:
    def __init__(self, text: str, line: int, col0: int, variables, arities: Dict[str, int], strict_arity=True):
        self.text = text
        self.i = 0
        self.line = line
        self.col0 = col0
        self.variables = variables
        self.arities = arities
        self.strict = strict_arity

    def error(self, msg: str):
        raise ParseError(msg, self.line, self.col0 + self.i + 1)

    def skip(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.i] if self.i < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            found = self.peek() or "end of input"
            self.error(f"expected {ch!r}, found {found!r}")
        self.i += 1

    def term(self) -> Term:
        self.skip()
        m = IDENT.match(self.text, self.i)
        if not m:
            found = self.peek() or "end of input"
            self.error(f"expected an identifier, found {found!r}")
        name = m.group(0)
        start = self.i
        self.i = m.end()
        args: List[Term] = []
        if self.peek() == "(":
            self.i += 1
            args.append(self.term())
            while self.peek() == ",":
                self.i += 1
                args.append(self.term())
            self.expect(")")
        if name in self.variables:
            if args:
                self.i = start
                self.error(f"variable {name} cannot take arguments")
            return Var(name)
        known = self.arities.get(name)
        if known is None:
            self.arities[name] = len(args)
        elif known != len(args):
            raise ArityConflict(
                f"line {self.line}, column {self.col0 + start + 1}: {name} used with arity {len(args)}, "
                f"but its arity is {known}",
                line=self.line,
                column=self.col0 + start + 1,
            )
        return App(name, tuple(args))

    def end(self):
        self.skip()
        if self.i != len(self.text):
            self.error(f"unexpected {self.text[self.i]!r}")


def parse_term(text: str, variables: Iterable[str] = (), arities: Optional[Mapping[str, int]] = None) -> Term:
    """Parse one term; identifiers listed in ``variables`` become variables."""
    table = dict(arities or {})
    r = _Reader(text, 1, 0, set(variables), table)
    t = r.term()
    r.end()
    return t


def parse_trs(text: str) -> Trs:
    declared: Dict[str, int] = {}
    variables: List[str] = []
    fresh: List[str] = []
    rule_lines: List[Tuple[int, int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip())
        word = stripped.split(None, 1)[0]
        rest = stripped[len(word):]
        if word == "sig":
            col = indent + len(word)
            for item in rest.split():
                col = line.index(item, col)
                name, slash, ar = item.partition("/")
                if not slash or not IDENT.fullmatch(name) or not ar.isdigit():
                    raise ParseError(f"bad signature entry {item!r} (want name/arity)", lineno, col + 1)
                arity = int(ar)
                if declared.setdefault(name, arity) != arity:
                    raise ArityConflict(f"line {lineno}: {name} declared with arities {declared[name]} and {arity}",
                                        line=lineno, column=col + 1)
                col += len(item)
        elif word in ("vars", "fresh"):
            col = indent + len(word)
            for item in rest.split():
                col = line.index(item, col)
                if not IDENT.fullmatch(item):
                    raise ParseError(f"bad identifier {item!r}", lineno, col + 1)
                (variables if word == "vars" else fresh).append(item)
                col += len(item)
        else:
            body_start = indent
            body = stripped
            if body.startswith("rule:"):
                body = body[len("rule:"):]
                body_start += len("rule:")
            rule_lines.append((lineno, body_start, body))
    varset = set(variables)
    clash = sorted(varset & set(declared))
    if clash:
        raise ParseError(f"{clash[0]} is declared both as a variable and as a symbol", 1, 1)
    arities = dict(declared)
    for name in fresh:
        if arities.setdefault(name, 0) != 0:
            raise ArityConflict(f"fresh constant {name} is declared with a nonzero arity")
    pairs = []
    for lineno, col0, body in rule_lines:
        m = ARROW.search(body)
        if not m:
            raise ParseError("expected '->' in rule", lineno, col0 + 1)
        left = _Reader(body[: m.start()], lineno, col0, varset, arities)
        lhs = left.term()
        left.end()
        right = _Reader(body[m.end():], lineno, col0 + m.end(), varset, arities)
        rhs = right.term()
        right.end()
        if isinstance(lhs, Var):
            raise VariableAsLhs(f"line {lineno}: the left-hand side {lhs} is a variable", line=lineno)
        pairs.append((lhs, rhs))
    for name in fresh:
        arities.pop(name, None)
    rules = [Rule(i, l, r) for i, (l, r) in enumerate(pairs)]
    return Trs.from_rules(rules, arities, variables, tuple(fresh))


def print_trs(trs: Trs, header: bool = True) -> str:
    lines = []
    if header:
        sig = [f"{n}/{a}" for n, a in trs.signature.items() if n not in trs.fresh]
        if sig:
            lines.append("sig " + " ".join(sig))
        if trs.declared_vars:
            lines.append("vars " + " ".join(sorted(trs.declared_vars)))
        if trs.fresh:
            lines.append("fresh " + " ".join(trs.fresh))
    for r in trs.rules:
        lines.append(f"{r.lhs} -> {r.rhs}")
    return "\n".join(lines) + "\n"
