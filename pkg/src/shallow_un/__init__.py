"""Uniqueness of normal forms (UN=) for shallow term rewrite systems."""

__version__ = "0.1.0"

from .closure import EquationSet, closure_of, expand_step, saturate, to_equations
from .equiv import EquivEngine, decide_equiv, oracle_equiv, verify_trace
from .errors import ShallowUNError
from .pcp import PcpInstance, generate_left_flat, generate_right_flat, solution_derivation, verify_solution
from .proof import ProofTrace, Step
from .syntax import parse_term, parse_trs, print_trs
from .terms import App, Symbol, Var
from .trs import Rule, Trs, enumerate_normal_forms, extend_signature, is_normal_form
from .undecide import decide_un, flatten, witness_report

__all__ = [
    "App", "EquationSet", "EquivEngine", "PcpInstance", "ProofTrace", "Rule", "ShallowUNError",
    "Step", "Symbol", "Trs", "Var", "closure_of", "decide_equiv", "decide_un", "enumerate_normal_forms",
    "expand_step", "extend_signature", "flatten", "generate_left_flat", "generate_right_flat",
    "is_normal_form", "oracle_equiv", "parse_term", "parse_trs", "print_trs", "saturate",
    "solution_derivation", "to_equations", "verify_solution", "verify_trace", "witness_report",
]
