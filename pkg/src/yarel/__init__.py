"""Toolchain for the Yarel reversible programming language."""

from .checker import Env, arity_of, build_env, check_unit
from .errors import YarelError
from .evaluator import EvalLimits, apply_perm, evaluate, invert_perm, run
from .inverter import invert, invert_module
from .syntax import (
    Call, Dec, Id, If, Inc, Inv, It, Module, Neg, Par, Perm, ProgramUnit, Seq,
    load_file, parse_expr, parse_module, pretty_print, resolve_imports, tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "Call", "Dec", "Env", "EvalLimits", "Id", "If", "Inc", "Inv", "It", "Module",
    "Neg", "Par", "Perm", "ProgramUnit", "Seq", "YarelError", "apply_perm",
    "arity_of", "build_env", "check_unit", "evaluate", "invert", "invert_module",
    "invert_perm", "load_file", "parse_expr", "parse_module", "pretty_print",
    "resolve_imports", "run", "tokenize",
]
