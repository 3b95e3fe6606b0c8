"""Abstract syntax of the fine-grain calculus with handlers.

Values and expressions are kept apart: every position that takes a value
holds a ``Value``.  Terms are frozen dataclasses, so they hash and compare
structurally and can be used as keys of monadic elements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Union as TUnion

from .effects import EffectAutomaton, EffectExpr, compile_effect
from .types import Arrow, Type


class _Node:
    """Caches the structural hash; terms are deep and hashed often."""

    __slots__ = ()

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
            object.__setattr__(self, "_hash", h)
        return h


# ---------------------------------------------------------------- values


@dataclass(frozen=True, eq=True)
class Var(_Node):
    name: str
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class RecFun(_Node):
    fname: str
    param: str
    param_type: Type
    result_type: Type
    latent: EffectExpr
    body: "Expression"
    __hash__ = _Node.__hash__

    @property
    def arrow(self) -> Arrow:
        return Arrow(self.param_type, compiled(self.latent), self.result_type)


@dataclass(frozen=True, eq=True)
class UnitV(_Node):
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Zero(_Node):
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Succ(_Node):
    pred: "Value"
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class TrueV(_Node):
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class FalseV(_Node):
    __hash__ = _Node.__hash__


Value = TUnion[Var, RecFun, UnitV, Zero, Succ, TrueV, FalseV]

UNIT = UnitV()
ZERO = Zero()
TRUE = TrueV()
FALSE = FalseV()


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True, eq=True)
class App(_Node):
    fn: Value
    arg: Value
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class OpCall(_Node):
    op: str
    args: tuple[Value, ...] = ()
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Return(_Node):
    value: Value
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Do(_Node):
    var: str
    bound: "Expression"
    body: "Expression"
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class If(_Node):
    cond: Value
    then: "Expression"
    orelse: "Expression"
    __hash__ = _Node.__hash__


PRIMS = ("pred", "iszero", "even")


@dataclass(frozen=True, eq=True)
class Prim(_Node):
    name: str
    arg: Value
    __hash__ = _Node.__hash__


CONTINUE = "c"
STOP = "s"


@dataclass(frozen=True, eq=True)
class Clause(_Node):
    op: str
    params: tuple[str, ...]
    body: "Expression"
    mode: str
    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Handler(_Node):
    clauses: tuple[Clause, ...]
    final_var: str
    final: "Expression"
    __hash__ = _Node.__hash__

    def __post_init__(self) -> None:
        ops = [c.op for c in self.clauses]
        if len(ops) != len(set(ops)):
            raise ValueError("duplicate clause for one operation")

    def clause(self, op: str) -> Clause | None:
        for c in self.clauses:
            if c.op == op:
                return c
        return None


@dataclass(frozen=True, eq=True)
class With(_Node):
    handler: Handler
    body: "Expression"
    __hash__ = _Node.__hash__


Expression = TUnion[App, OpCall, Return, Do, If, Prim, With]
Term = TUnion[Value, Expression]

@dataclass(frozen=True)
class Shown:
    """A value displayed verbatim; used only when abbreviating traces.

    ``fv`` keeps the free variables of whatever it stands for.
    """

    text: str
    fv: frozenset[str] = frozenset()


VALUE_TYPES = (Var, RecFun, UnitV, Zero, Succ, TrueV, FalseV)


@dataclass(frozen=True)
class Signature:
    args: tuple[Type, ...]
    result: Type


@dataclass(frozen=True)
class Program:
    signatures: Mapping[str, Signature]
    main: Expression


@lru_cache(maxsize=None)
def compiled(e: EffectExpr) -> EffectAutomaton:
    return compile_effect(e)


# ---------------------------------------------------------------- numerals


def nat(n: int) -> Value:
    v: Value = ZERO
    for _ in range(n):
        v = Succ(v)
    return v


def as_int(v: Value) -> int | None:
    n = 0
    while isinstance(v, Succ):
        v, n = v.pred, n + 1
    return n if isinstance(v, Zero) else None


# ---------------------------------------------------------------- free variables


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, (UnitV, Zero, TrueV, FalseV)):
        return frozenset()
    if isinstance(t, Shown):
        return t.fv
    if isinstance(t, Succ):
        return free_vars(t.pred)
    if isinstance(t, RecFun):
        return free_vars(t.body) - {t.fname, t.param}
    if isinstance(t, App):
        return free_vars(t.fn) | free_vars(t.arg)
    if isinstance(t, OpCall):
        return frozenset().union(*(free_vars(a) for a in t.args))
    if isinstance(t, Return):
        return free_vars(t.value)
    if isinstance(t, Do):
        return free_vars(t.bound) | (free_vars(t.body) - {t.var})
    if isinstance(t, If):
        return free_vars(t.cond) | free_vars(t.then) | free_vars(t.orelse)
    if isinstance(t, Prim):
        return free_vars(t.arg)
    if isinstance(t, With):
        return _handler_fv(t.handler) | free_vars(t.body)
    raise TypeError(f"not a term: {t!r}")


def _handler_fv(h: Handler) -> frozenset[str]:
    out = free_vars(h.final) - {h.final_var}
    for c in h.clauses:
        out |= free_vars(c.body) - set(c.params)
    return out


# ---------------------------------------------------------------- substitution

_fresh = itertools.count()


def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    stem = base.split("_")[0] or "v"
    while True:
        name = f"{stem}_{next(_fresh)}"
        if name not in avoid:
            return name


def substitute(t: Term, bindings: Mapping[str, Value]) -> Term:
    """Simultaneous capture-avoiding substitution."""
    if not bindings:
        return t
    if isinstance(t, Var):
        return bindings.get(t.name, t)
    if isinstance(t, (UnitV, Zero, TrueV, FalseV)):
        return t
    if isinstance(t, Succ):
        return Succ(substitute(t.pred, bindings))
    if isinstance(t, RecFun):
        (f, x), body, b = _under(bindings, (t.fname, t.param), t.body)
        return RecFun(f, x, t.param_type, t.result_type, t.latent, substitute(body, b))
    if isinstance(t, App):
        return App(substitute(t.fn, bindings), substitute(t.arg, bindings))
    if isinstance(t, OpCall):
        return OpCall(t.op, tuple(substitute(a, bindings) for a in t.args))
    if isinstance(t, Return):
        return Return(substitute(t.value, bindings))
    if isinstance(t, Do):
        (x,), body, b = _under(bindings, (t.var,), t.body)
        return Do(x, substitute(t.bound, bindings), substitute(body, b))
    if isinstance(t, If):
        return If(
            substitute(t.cond, bindings),
            substitute(t.then, bindings),
            substitute(t.orelse, bindings),
        )
    if isinstance(t, Prim):
        return Prim(t.name, substitute(t.arg, bindings))
    if isinstance(t, With):
        return With(_subst_handler(t.handler, bindings), substitute(t.body, bindings))
    raise TypeError(f"not a term: {t!r}")


def _subst_handler(h: Handler, bindings: Mapping[str, Value]) -> Handler:
    clauses = []
    for c in h.clauses:
        params, body, b = _under(bindings, c.params, c.body)
        clauses.append(Clause(c.op, params, substitute(body, b), c.mode))
    (x,), final, b = _under(bindings, (h.final_var,), h.final)
    return Handler(tuple(clauses), x, substitute(final, b))


def _under(bindings: Mapping[str, Value], binders: tuple[str, ...], body: Term):
    """Drop shadowed bindings and rename binders that would capture."""
    b = {k: v for k, v in bindings.items() if k not in binders}
    if not b:
        return binders, body, b
    incoming: set[str] = set()
    for v in b.values():
        incoming |= free_vars(v)
    if not incoming & set(binders):
        return binders, body, b
    avoid = incoming | set(free_vars(body)) | set(b)
    renamed = []
    ren: dict[str, Value] = {}
    for x in binders:
        if x in incoming:
            y = fresh_name(x, avoid)
            avoid.add(y)
            ren[x] = Var(y)
            renamed.append(y)
        else:
            renamed.append(x)
    return tuple(renamed), substitute(body, ren), b
