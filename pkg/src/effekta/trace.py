"""Printing monadic configurations and reduction traces.

``normalize`` is a display-only pass that hides the administrative steps
of the fine-grain syntax: ``do y <- p(v); if y then a else b`` is shown as
``if p(v) then a else b`` and primitives on literals are folded.  Adjacent
lines that print the same are then merged.
"""

from __future__ import annotations

from typing import Mapping

from .monads import (
    BOTTOM, Dist, Exc, ExceptionMonad, ListMonad, Monad, OperationImpl, Out,
)
from .pretty import show_expr, show_value
from .semantics import WRONG, ExpC, ValC, _prim, trace
from .syntax import App, Do, Expression, If, Prim, RecFun, Return, Shown, Var, With, free_vars


def show_conf(c) -> str:
    if isinstance(c, ExpC):
        return show_expr(c.expr)
    if isinstance(c, ValC):
        return show_value(c.value)
    if c is WRONG:
        return "wrong"
    if c is BOTTOM:
        return "bottom"
    # bare values and expressions, e.g. after res_extract or inside a handler
    try:
        return show_expr(c)
    except TypeError:
        return show_value(c)


def show_element(m, tag: Monad, show=show_conf) -> str:
    if isinstance(tag, ExceptionMonad):
        if m is BOTTOM:
            return "bottom"
        if isinstance(m, Exc):
            return f"exception {m.name}"
        return show(m.payload)
    if isinstance(tag, ListMonad):
        return "[" + ", ".join(show(x) for x in m) + "]"
    if isinstance(m, Dist):
        return "{" + ", ".join(f"{show(x)}: {p}" for x, p in m.items()) + "}"
    if isinstance(m, Out):
        word = "".join(f"({loc},{n})" for loc, n in m.word) or "eps"
        payload = "bottom" if m.payload is BOTTOM else show(m.payload)
        return f"<{word}, {payload}>"
    return repr(m)


def to_json(m, tag: Monad, show=show_conf):
    """Machine-readable form of a monadic element."""
    if isinstance(tag, ExceptionMonad):
        if m is BOTTOM:
            return {"bottom": True}
        if isinstance(m, Exc):
            return {"exception": m.name}
        return {"value": show(m.payload)}
    if isinstance(tag, ListMonad):
        return {"list": [show(x) for x in m]}
    if isinstance(m, Dist):
        return {"distribution": [[show(x), str(p)] for x, p in m.items()], "mass": str(m.mass())}
    if isinstance(m, Out):
        return {
            "word": [[loc, n] for loc, n in m.word],
            "payload": None if m.payload is BOTTOM else show(m.payload),
        }
    return repr(m)


def trace_lines(e: Expression, budget: int, tag: Monad, impls: Mapping[str, OperationImpl]) -> list[str]:
    return [f"{n}: {show_element(m, tag)}" for n, m in enumerate(trace(e, budget, tag, impls))]


# ---------------------------------------------------------------- display normalization


def _abbrev(v, names: Mapping[RecFun, str]):
    if isinstance(v, RecFun) and v in names:
        return Shown(names[v])
    return v


def normalize(e: Expression, names: Mapping[RecFun, str] | None = None) -> Expression:
    names = names or {}
    if isinstance(e, Do):
        y, b, body = e.var, e.bound, e.body
        if (isinstance(body, If) and body.cond == Var(y)
                and y not in free_vars(body.then) and y not in free_vars(body.orelse)):
            if isinstance(b, Return):
                cond = b.value
            elif isinstance(b, Prim):
                cond = Shown(f"{b.name}({show_value(b.arg)})", free_vars(b.arg))
            else:
                cond = None
            if cond is not None:
                return If(cond, normalize(body.then, names), normalize(body.orelse, names))
        return Do(y, normalize(b, names), normalize(body, names))
    if isinstance(e, Prim):
        v = _prim(e.name, e.arg)
        return e if v is None else Return(v)
    if isinstance(e, If):
        return If(e.cond, normalize(e.then, names), normalize(e.orelse, names))
    if isinstance(e, App):
        return App(_abbrev(e.fn, names), _abbrev(e.arg, names))
    if isinstance(e, With):
        return With(e.handler, normalize(e.body, names))
    return e


def normalized_trace(
    e: Expression,
    budget: int,
    tag: Monad,
    impls: Mapping[str, OperationImpl],
    names: Mapping[RecFun, str] | None = None,
) -> list[str]:
    """Trace lines with administrative steps hidden; one line per visible step."""

    def show(c) -> str:
        if isinstance(c, ExpC):
            return show_expr(normalize(c.expr, names))
        return show_conf(c)

    out: list[str] = []
    for m in trace(e, budget, tag, impls):
        line = show_element(m, tag, show)
        if not out or out[-1] != line:
            out.append(line)
    return out
