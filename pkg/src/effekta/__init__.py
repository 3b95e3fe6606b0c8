"""Interpreter, type-and-effect checker and soundness harness for a
call-by-value lambda calculus with generic effects and handlers."""

from .checker import Checker, Report, TypeAndEffect, TypeCheckError, check_program
from .config import RunConfig, config_from_dict, load_config, preset
from .effects import compile_effect, eff_equal, eff_includes, filter_apply
from .parser import parse_effect, parse_expr, parse_program, parse_type, parse_value
from .semantics import approximant_chain, finitary_sem

__all__ = [
    "Checker", "Report", "RunConfig", "TypeAndEffect", "TypeCheckError", "approximant_chain",
    "check_program", "compile_effect", "config_from_dict", "eff_equal", "eff_includes",
    "filter_apply", "finitary_sem", "load_config", "parse_effect", "parse_expr",
    "parse_program", "parse_type", "parse_value", "preset",
]
