"""Printing terms in the concrete syntax accepted by the parser."""

from __future__ import annotations

from .effects import show_effexpr
from .syntax import (
    App, Do, Expression, FalseV, If, OpCall, Prim, RecFun, Return, Shown, Succ, TrueV, UnitV,
    Value, Var, With, Zero, as_int, free_vars,
)
from .types import show_type

UNUSED = "_"


def show_value(v: Value) -> str:
    if isinstance(v, Shown):
        return v.text
    if isinstance(v, Var):
        return v.name
    if isinstance(v, UnitV):
        return "unit"
    if isinstance(v, TrueV):
        return "true"
    if isinstance(v, FalseV):
        return "false"
    if isinstance(v, (Zero, Succ)):
        n = as_int(v)
        if n is not None:
            return str(n)
        return f"succ({show_value(v.pred)})"
    if isinstance(v, RecFun):
        header = f"({v.param}: {show_type(v.param_type)}): {show_type(v.result_type)} ! {show_effexpr(v.latent)}"
        if v.fname == UNUSED or v.fname not in free_vars(v.body):
            return f"(fun {header} -> {show_expr(v.body)})"
        return f"(rec {v.fname} {header} = {show_expr(v.body)})"
    raise TypeError(f"not a value: {v!r}")


def show_expr(e: Expression, top: bool = True) -> str:
    """``top`` allows an unparenthesised sequence."""
    if isinstance(e, Do):
        first = show_expr(e.bound, False)
        if e.var == UNUSED or e.var not in free_vars(e.body):
            s = f"{first}; {show_expr(e.body)}"
        else:
            s = f"do {e.var} <- {first}; {show_expr(e.body)}"
        return s if top else f"({s})"
    if isinstance(e, App):
        return f"{show_value(e.fn)} {show_value(e.arg)}"
    if isinstance(e, OpCall):
        return f"{e.op}({', '.join(show_value(a) for a in e.args)})"
    if isinstance(e, Return):
        return f"return {show_value(e.value)}"
    if isinstance(e, Prim):
        return f"{e.name}({show_value(e.arg)})"
    if isinstance(e, If):
        return (
            f"if {show_value(e.cond)} then {show_expr(e.then, False)}"
            f" else {show_expr(e.orelse, False)}"
        )
    if isinstance(e, With):
        return f"with {show_handler(e.handler)} handle {show_expr(e.body, False)}"
    raise TypeError(f"not an expression: {e!r}")


def show_handler(h) -> str:
    parts = [
        f"{c.op}({', '.join(c.params)}) ={c.mode} -> {show_expr(c.body, False)}"
        for c in h.clauses
    ]
    final = f"finally {h.final_var} -> {show_expr(h.final)}"
    if parts:
        return "{" + ", ".join(parts) + "; " + final + "}"
    return "{" + final + "}"


def show_term(t) -> str:
    if isinstance(t, (App, OpCall, Return, Do, If, Prim, With)):
        return show_expr(t)
    return show_value(t)
