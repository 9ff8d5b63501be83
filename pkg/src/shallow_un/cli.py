"""Command-line interface.

Exit codes: ``check-un`` returns 0 for UN=, 10 for not-UN=; ``word``,
``pcp check`` and ``trace verify`` return 0 for a positive answer and 1
otherwise; any error returns 2.  Positions are 1-based in human output and
0-based in JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import __version__
from .closure import closure_of, format_closure
from .equiv import EquivResult, decide_equiv, oracle_equiv, verify_trace
from .errors import NotShallow, ShallowUNError
from .pcp import generate, parse_pcp, solution_derivation, trace_terms, verify_solution
from .proof import ProofTrace, Step
from .syntax import parse_term, parse_trs, print_trs
from .trs import DEFAULT_NF_CAP, enumerate_normal_forms, extend_signature
from .undecide import decide_un, flatten, format_steps, witness_report

EXIT_OK = 0
EXIT_NO = 1
EXIT_ERROR = 2
EXIT_NOT_UN = 10


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str):
    return parse_trs(_read(path))


# -- subcommands -------------------------------------------------------------


def cmd_check_un(args) -> int:
    trs = _load(args.file)
    if not trs.is_shallow():
        bad = next(r for r in trs.rules if not r.shallow)
        raise NotShallow(
            f"rule {bad.id} ({bad}) is not shallow; UN= is undecidable once variables "
            "may sit at depth two, so no decision is attempted"
        )
    v = decide_un(trs, cap=args.cap, use_declared=args.use_declared, backend=args.backend)
    rep = witness_report(v)
    if args.json:
        rep = dict(rep)
        rep.pop("text")
        print(_dump(rep))
    else:
        print(rep["text"])
    return EXIT_OK if v.un_eq else EXIT_NOT_UN


def _print_equiv(res: EquivResult, trs, args, note: str = "") -> None:
    if args.json:
        out = res.to_json()
        if note:
            out["note"] = note
        print(_dump(out))
        return
    if note:
        print(note)
    if res.status == "equivalent":
        extra = ""
        if res.closure_trace is not None:
            extra = f"{len(res.closure_trace.steps)} closure steps, "
        print(f"equivalent ({extra}{len(res.trace.steps)} rule steps)")
        for line in format_steps(res.trace, trs):
            print("  " + line)
    elif res.status == "not-equivalent":
        print("not equivalent (per decision procedure)")
    else:
        print("unknown (search bounds exhausted)")


def cmd_word(args) -> int:
    trs = _load(args.file)
    s = parse_term(args.term1, trs.declared_vars, trs.signature)
    t = parse_term(args.term2, trs.declared_vars, trs.signature)
    note = ""
    if args.oracle or not trs.is_flat():
        if not args.oracle:
            note = "system is not flat: using bounded search"
        res = oracle_equiv(s, t, trs, size_cap=args.size_cap, step_cap=args.step_cap)
    else:
        res = decide_equiv(s, t, trs, backend=args.backend)
    if args.trace_out and res.trace is not None:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            fh.write(_dump(res.trace.to_json()) + "\n")
    _print_equiv(res, trs, args, note)
    return EXIT_OK if res.equivalent else EXIT_NO


def cmd_closure(args) -> int:
    eqs = closure_of(_load(args.file))
    if args.json:
        print(_dump([{"id": e.id, "lhs": str(e.lhs), "rhs": str(e.rhs), "provenance": str(e.provenance)}
                     for e in sorted(eqs, key=lambda e: e.id)]))
    else:
        print(format_closure(eqs))
    return EXIT_OK


def cmd_flatten(args) -> int:
    fr = flatten(_load(args.file))
    if args.json:
        print(_dump({"system": print_trs(fr.flat_system),
                     "constants": {c: str(t) for c, t in fr.constant_table.items()}}))
    else:
        sys.stdout.write(print_trs(fr.flat_system))
        for c, t in fr.constant_table.items():
            print(f"# {c} == {t}")
    return EXIT_OK


def cmd_nf(args) -> int:
    trs = _load(args.file)
    if args.extend:
        trs = extend_signature(trs)
    nfs = enumerate_normal_forms(trs, args.max_height, cap=args.cap, use_declared=args.use_declared)
    if args.json:
        print(_dump([str(t) for t in nfs]))
    else:
        for t in nfs:
            print(t)
    return EXIT_OK


def _solution(text: str) -> List[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tile sequence {text!r}") from None


def cmd_pcp_gen(args) -> int:
    p = parse_pcp(_read(args.file), allow_empty=args.allow_empty)
    system = generate(p, args.variant)
    if args.json:
        print(_dump({"variant": args.variant, "rules": [str(r) for r in system.trs.rules]}))
    else:
        sys.stdout.write(print_trs(system.trs))
    return EXIT_OK


def cmd_pcp_check(args) -> int:
    p = parse_pcp(_read(args.file), allow_empty=args.allow_empty)
    ok = verify_solution(p, args.solution)
    if args.json:
        print(_dump({"solution": args.solution, "valid": ok}))
    else:
        print("solution" if ok else "not a solution")
    return EXIT_OK if ok else EXIT_NO


def cmd_pcp_derive(args) -> int:
    p = parse_pcp(_read(args.file), allow_empty=args.allow_empty)
    system, trace = solution_derivation(p, args.solution, args.variant)
    ok = verify_trace(trace, system.trs)
    if args.json:
        out = trace.to_json()
        out["verified"] = ok
        out["terms"] = [str(t) for t in trace_terms(system, trace)]
        print(_dump(out))
    else:
        terms = trace_terms(system, trace)
        print(f"0 <->* 1 in {len(trace.steps)} steps ({'verified' if ok else 'FAILED'})")
        print(f"  {terms[0]}")
        for s, t in zip(trace.steps, terms[1:]):
            arrow = "->" if s.dir == "lr" else "<-"
            print(f"  {arrow} {t}   (rule {s.eq}: {system.trs.by_id[s.eq]})")
    return EXIT_OK if ok else EXIT_NO


def trace_from_json(data: dict, variables) -> ProofTrace:
    names = set(variables) | set(data.get("vars", []))
    s, t = (parse_term(x, names) for x in data["endpoints"])
    steps = []
    for st in data["steps"]:
        subst = {k: parse_term(v, names) for k, v in st.get("subst", {}).items()}
        steps.append(Step(tuple(st["pos"]), int(st["eq"]), st["dir"], subst))
    return ProofTrace((s, t), steps, bool(data.get("lowered", True)))


def cmd_trace_verify(args) -> int:
    trs = _load(args.file)
    trace = trace_from_json(json.loads(_read(args.trace)), trs.declared_vars)
    ok = verify_trace(trace, trs)
    if args.json:
        print(_dump({"valid": ok, "steps": len(trace.steps)}))
    else:
        print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_NO


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shallow-un", description="UN= for shallow rewrite systems.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = common(sub.add_parser("check-un", help="decide UN= for a shallow system"))
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=DEFAULT_NF_CAP, help="normal-form enumeration cap")
    p.add_argument("--use-declared", action="store_true", help="enumerate over declared symbols too")
    p.add_argument("--backend", choices=["python", "compiled"], default=None)
    p.set_defaults(func=cmd_check_un)

    p = common(sub.add_parser("word", help="decide whether two terms are equivalent"))
    p.add_argument("file")
    p.add_argument("term1")
    p.add_argument("term2")
    p.add_argument("--oracle", action="store_true", help="use the bounded search instead")
    p.add_argument("--size-cap", type=int, default=12)
    p.add_argument("--step-cap", type=int, default=8)
    p.add_argument("--trace-out", help="write the trace as JSON to this file")
    p.add_argument("--backend", choices=["python", "compiled"], default=None)
    p.set_defaults(func=cmd_word)

    p = common(sub.add_parser("closure", help="print the equational closure"))
    p.add_argument("file")
    p.set_defaults(func=cmd_closure)

    p = common(sub.add_parser("flatten", help="flatten a shallow system"))
    p.add_argument("file")
    p.set_defaults(func=cmd_flatten)

    p = common(sub.add_parser("nf", help="list ground normal forms"))
    p.add_argument("file")
    p.add_argument("--max-height", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_NF_CAP)
    p.add_argument("--extend", action="store_true", help="add the inert enumeration constants")
    p.add_argument("--use-declared", action="store_true")
    p.set_defaults(func=cmd_nf)

    pcp = sub.add_parser("pcp", help="Post correspondence constructions")
    psub = pcp.add_subparsers(dest="pcp_command", required=True)
    for name, func, help_ in (("gen", cmd_pcp_gen, "emit the rewrite system"),
                              ("check", cmd_pcp_check, "check a tile sequence"),
                              ("derive", cmd_pcp_derive, "emit the 0 <->* 1 trace of a solution")):
        q = common(psub.add_parser(name, help=help_))
        q.add_argument("file")
        q.add_argument("--allow-empty", action="store_true", help="accept empty tile words")
        if name != "check":
            q.add_argument("--variant", choices=["right-flat", "left-flat"], default="right-flat")
        if name != "gen":
            q.add_argument("--solution", type=_solution, required=True, help="e.g. 3,2,3,1")
        q.set_defaults(func=func)

    tr = sub.add_parser("trace", help="proof traces")
    tsub = tr.add_subparsers(dest="trace_command", required=True)
    q = common(tsub.add_parser("verify", help="replay a JSON trace against a system"))
    q.add_argument("file")
    q.add_argument("trace")
    q.set_defaults(func=cmd_trace_verify)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ShallowUNError as exc:
        rec = exc.to_record()
        if getattr(args, "json", False):
            print(_dump({"error": rec}))
        else:
            print(f"error[{rec['code']}]: {rec['message']}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        code = "io" if isinstance(exc, OSError) else "bad-input"
        if getattr(args, "json", False):
            print(_dump({"error": {"code": code, "message": str(exc)}}))
        else:
            print(f"error[{code}]: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
