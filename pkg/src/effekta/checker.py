"""Algorithmic type-and-effect checking, including handlers.

Subsumption is folded into the side conditions of the syntax-directed
rules, so each judgment infers the most precise type and effect it can
and checks inclusions only where a rule demands one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .effects import (
    DEFAULT_BOUNDS, Bounds, ClauseFilter, EffectAutomaton, HandlerFilter, Inclusion,
    eff_atom, eff_concat, eff_epsilon, eff_includes, eff_union, filter_apply,
)
from .syntax import (
    App, Do, Expression, FalseV, Handler, If, OpCall, Prim, Program, RecFun, Return,
    Signature, Succ, TrueV, UnitV, Value, Var, With, Zero,
)
from .types import BOOL, BOT, NAT, UNIT, Arrow, Type, show_type, subtype

Context = Mapping[str, Type]


class TypeCheckError(Exception):
    def __init__(self, rule: str, message: str) -> None:
        super().__init__(f"({rule}) {message}")
        self.rule = rule
        self.message = message


class UndecidedSubeffect(TypeCheckError):
    """An inclusion the checker could neither prove nor refute."""


@dataclass(frozen=True)
class TypeAndEffect:
    ty: Type
    eff: EffectAutomaton

    def __str__(self) -> str:
        return f"{show_type(self.ty)} ! {self.eff.describe()}"


_PRIM_TYPES = {"pred": (NAT, NAT), "iszero": (NAT, BOOL), "even": (NAT, BOOL)}


def _require(answer: Inclusion, rule: str, what: str) -> None:
    if answer.no:
        witness = f" (witness: {_show_witness(answer.witness)})" if answer.witness is not None else ""
        raise TypeCheckError(rule, what + witness)
    if answer.unknown:
        raise UndecidedSubeffect(rule, "undecided subeffect: " + what)


def _show_witness(w) -> str:
    if isinstance(w, tuple):
        return ".".join(w) or "eps"
    return str(w)


class Checker:
    def __init__(self, signatures: Mapping[str, Signature], bounds: Bounds = DEFAULT_BOUNDS) -> None:
        self.sigs = dict(signatures)
        self.bounds = bounds
        self._closed: dict[Expression, TypeAndEffect] = {}
        self._closed_fns: dict[RecFun, Type] = {}

    # ---- helpers

    def sub(self, t1: Type, t2: Type, rule: str, what: str | None = None) -> None:
        _require(subtype(t1, t2, self.bounds), rule,
                 what or f"{show_type(t1)} not subtype of {show_type(t2)}")

    def join(self, t1: Type, t2: Type, rule: str) -> Type:
        """The larger of two comparable types."""
        if subtype(t1, t2, self.bounds).yes:
            return t2
        if subtype(t2, t1, self.bounds).yes:
            return t1
        raise TypeCheckError(rule, f"types {show_type(t1)} and {show_type(t2)} have no common supertype among them")

    # ---- values

    def infer_value(self, ctx: Context, v: Value) -> Type:
        if isinstance(v, Var):
            if v.name not in ctx:
                raise TypeCheckError("t-var", f"unbound variable {v.name}")
            return ctx[v.name]
        if isinstance(v, UnitV):
            return UNIT
        if isinstance(v, (TrueV, FalseV)):
            return BOOL
        if isinstance(v, Zero):
            return NAT
        if isinstance(v, Succ):
            self.sub(self.infer_value(ctx, v.pred), NAT, "t-succ")
            return NAT
        if isinstance(v, RecFun):
            if not ctx:
                if v not in self._closed_fns:
                    self._closed_fns[v] = self._infer_fun(ctx, v)
                return self._closed_fns[v]
            return self._infer_fun(ctx, v)
        raise TypeError(f"not a value: {v!r}")

    def _infer_fun(self, ctx: Context, v: RecFun) -> Type:
        arrow = v.arrow
        inner = dict(ctx)
        inner[v.fname] = arrow
        inner[v.param] = v.param_type
        body = self.infer_expr(inner, v.body)
        self.sub(body.ty, v.result_type, "t-abs",
                 f"body type {show_type(body.ty)} not subtype of declared {show_type(v.result_type)}")
        _require(eff_includes(body.eff, arrow.latent, self.bounds), "t-abs",
                 f"body effect {body.eff.describe()} not included in declared {arrow.latent.describe()}")
        return arrow

    # ---- expressions

    def infer_expr(self, ctx: Context, e: Expression) -> TypeAndEffect:
        if not ctx:
            hit = self._closed.get(e)
            if hit is None:
                hit = self._closed[e] = self._infer(ctx, e)
            return hit
        return self._infer(ctx, e)

    def _infer(self, ctx: Context, e: Expression) -> TypeAndEffect:
        if isinstance(e, Return):
            return TypeAndEffect(self.infer_value(ctx, e.value), eff_epsilon())
        if isinstance(e, App):
            fn = self.infer_value(ctx, e.fn)
            arg = self.infer_value(ctx, e.arg)
            if fn == BOT:
                return TypeAndEffect(BOT, eff_epsilon())
            if not isinstance(fn, Arrow):
                raise TypeCheckError("t-app", f"callee is not a function type: {show_type(fn)}")
            self.sub(arg, fn.param, "t-app",
                     f"argument type {show_type(arg)} not subtype of parameter {show_type(fn.param)}")
            return TypeAndEffect(fn.result, fn.latent)
        if isinstance(e, OpCall):
            sig = self._signature(e.op, "t-op")
            if len(sig.args) != len(e.args):
                raise TypeCheckError("t-op", f"operation {e.op} expects {len(sig.args)} argument(s), got {len(e.args)}")
            for a, t in zip(e.args, sig.args):
                self.sub(self.infer_value(ctx, a), t, "t-op")
            return TypeAndEffect(sig.result, eff_atom(e.op))
        if isinstance(e, Do):
            first = self.infer_expr(ctx, e.bound)
            inner = dict(ctx)
            inner[e.var] = first.ty
            rest = self.infer_expr(inner, e.body)
            return TypeAndEffect(rest.ty, eff_concat(first.eff, rest.eff))
        if isinstance(e, If):
            self.sub(self.infer_value(ctx, e.cond), BOOL, "t-if", "condition is not a boolean")
            a = self.infer_expr(ctx, e.then)
            b = self.infer_expr(ctx, e.orelse)
            return TypeAndEffect(self.join(a.ty, b.ty, "t-if"), eff_union(a.eff, b.eff))
        if isinstance(e, Prim):
            arg_t, res_t = _PRIM_TYPES[e.name]
            self.sub(self.infer_value(ctx, e.arg), arg_t, "t-prim")
            return TypeAndEffect(res_t, eff_epsilon())
        if isinstance(e, With):
            inner = self.infer_expr(ctx, e.body)
            out, h = self.extract_filter(ctx, inner.ty, e.handler)
            return TypeAndEffect(out, filter_apply(h, inner.eff))
        raise TypeError(f"not an expression: {e!r}")

    def _signature(self, op: str, rule: str) -> Signature:
        sig = self.sigs.get(op)
        if sig is None:
            raise TypeCheckError(rule, f"undeclared operation {op}")
        return sig

    def extract_filter(self, ctx: Context, in_type: Type, h: Handler) -> tuple[Type, HandlerFilter]:
        fctx = dict(ctx)
        fctx[h.final_var] = in_type
        final = self.infer_expr(fctx, h.final)
        out = final.ty
        typed = []
        for c in h.clauses:
            sig = self._signature(c.op, "t-handler")
            if len(sig.args) != len(c.params):
                raise TypeCheckError("t-handler", f"clause for {c.op} binds {len(c.params)} parameter(s), operation takes {len(sig.args)}")
            cctx = dict(ctx)
            cctx.update(zip(c.params, sig.args))
            typed.append((c, sig, self.infer_expr(cctx, c.body)))
        # stop clauses deliver the handler's result; widen the out type to cover them
        for c, _, te in typed:
            if c.mode == "s":
                out = self.join(out, te.ty, "t-stop")
        clauses = []
        for c, sig, te in typed:
            if c.mode == "c":
                what = f"clause result {show_type(te.ty)} not subtype of {show_type(sig.result)}"
                if sig.result == BOT:
                    what += f": no value has type Bot, so {c.op} cannot resume; use a stop clause"
                self.sub(te.ty, sig.result, "t-continue", what)
            else:
                self.sub(te.ty, out, "t-stop",
                         f"clause result {show_type(te.ty)} not subtype of {show_type(out)}")
            clauses.append(ClauseFilter(c.op, c.mode, te.eff))
        return out, HandlerFilter(tuple(clauses), final.eff)


@dataclass
class Report:
    type: Type | None = None
    effect: EffectAutomaton | None = None
    diagnostics: list[str] = field(default_factory=list)
    undecided: bool = False

    @property
    def ok(self) -> bool:
        return self.type is not None and not self.diagnostics

    def to_json(self) -> dict:
        return {
            "type": None if self.type is None else show_type(self.type),
            "effect": None if self.effect is None else self.effect.describe(),
            "diagnostics": list(self.diagnostics),
        }

    def __str__(self) -> str:
        if self.ok:
            return f"{show_type(self.type)} ! {self.effect.describe()}"
        return "\n".join(self.diagnostics)


def check_program(p: Program, bounds: Bounds = DEFAULT_BOUNDS) -> Report:
    try:
        te = Checker(p.signatures, bounds).infer_expr({}, p.main)
    except TypeCheckError as err:
        return Report(diagnostics=[str(err)], undecided=isinstance(err, UndecidedSubeffect))
    return Report(te.ty, te.eff)


def type_of_value(v: Value, signatures: Mapping[str, Signature], bounds: Bounds = DEFAULT_BOUNDS) -> Type:
    return Checker(signatures, bounds).infer_value({}, v)
