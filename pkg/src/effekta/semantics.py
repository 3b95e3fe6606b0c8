"""Pure and monadic reduction, configuration steps and their iteration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .monads import Monad, OperationImpl, mrun
from .syntax import (
    FALSE, TRUE, ZERO, App, Do, Expression, FalseV, Handler, If, OpCall, Prim,
    RecFun, Return, Succ, TrueV, Value, Var, With, Zero, _handler_fv, as_int, free_vars,
    fresh_name, substitute,
)

# ---------------------------------------------------------------- configurations


@dataclass(frozen=True)
class ExpC:
    expr: Expression


@dataclass(frozen=True)
class ValC:
    value: Value


class _Wrong:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "WRONG"

    def __reduce__(self):
        return (_Wrong, ())


WRONG = _Wrong()


def is_result_payload(c) -> bool:
    return isinstance(c, ValC) or c is WRONG


@dataclass(frozen=True)
class Silent:
    pass


@dataclass(frozen=True)
class Raised:
    op: str


SILENT = Silent()
StepLabel = Silent | Raised

# ---------------------------------------------------------------- pure reduction


def _prim(name: str, v: Value) -> Value | None:
    n = as_int(v)
    if name == "iszero":
        if isinstance(v, Zero):
            return TRUE
        return FALSE if isinstance(v, Succ) else None
    if name == "pred":
        if isinstance(v, Zero):
            return ZERO
        return v.pred if isinstance(v, Succ) else None
    if name == "even":
        return None if n is None else (TRUE if n % 2 == 0 else FALSE)
    return None


def pure_step(e: Expression) -> Expression | None:
    if isinstance(e, App):
        f = e.fn
        if not isinstance(f, RecFun):
            return None
        return substitute(f.body, {f.fname: f, f.param: e.arg})
    if isinstance(e, If):
        if isinstance(e.cond, TrueV):
            return e.then
        if isinstance(e.cond, FalseV):
            return e.orelse
        return None
    if isinstance(e, Prim):
        v = _prim(e.name, e.arg)
        return None if v is None else Return(v)
    if isinstance(e, With):
        return _with_step(e.handler, e.body)
    return None


def _with_step(h: Handler, body: Expression) -> Expression | None:
    if isinstance(body, Do):
        # with h handle (do y <- e1; e2)  ->  with {c; y -> with h handle e2} handle e1
        y, e2 = body.var, body.body
        avoid = _handler_fv(h)
        if y in avoid:
            z = fresh_name(y, avoid | free_vars(e2))
            e2 = substitute(e2, {y: Var(z)})
            y = z
        inner = Handler(h.clauses, y, With(h, e2))
        return With(inner, body.bound)
    if isinstance(body, Return):
        return Do(h.final_var, body, h.final)
    if isinstance(body, OpCall):
        c = h.clause(body.op)
        if c is None:
            x = h.final_var
            return Do(x, body, h.final)
        inst = substitute(c.body, dict(zip(c.params, body.args)))
        if c.mode == "s":
            return inst
        return Do(h.final_var, inst, h.final)
    inner = pure_step(body)
    return None if inner is None else With(h, inner)


# ---------------------------------------------------------------- monadic reduction


def monadic_step(e: Expression, tag: Monad, impls: Mapping[str, OperationImpl]):
    """One step of monadic reduction: ``(element of M Exp, label)`` or ``None``."""
    if isinstance(e, Do):
        if isinstance(e.bound, Return):
            return tag.unit(substitute(e.body, {e.var: e.bound.value})), SILENT
        inner = monadic_step(e.bound, tag, impls)
        if inner is None:
            return None
        m, label = inner
        x, body = e.var, e.body
        return tag.fmap(lambda e1: Do(x, e1, body), m), label
    if isinstance(e, OpCall):
        impl = impls.get(e.op)
        if impl is None:
            return None
        m = mrun(impl, e.args, tag)
        if m is None:
            return None
        return tag.fmap(Return, m), Raised(e.op)
    e2 = pure_step(e)
    if e2 is None:
        return None
    return tag.unit(e2), SILENT


def conf_step(c, tag: Monad, impls: Mapping[str, OperationImpl]):
    if not isinstance(c, ExpC):
        return tag.unit(c)
    e = c.expr
    if isinstance(e, Return):
        return tag.unit(ValC(e.value))
    r = monadic_step(e, tag, impls)
    if r is None:
        return tag.unit(WRONG)
    return tag.fmap(ExpC, r[0])


def step_all(m, tag: Monad, impls: Mapping[str, OperationImpl]):
    return tag.bind(m, lambda c: conf_step(c, tag, impls))


def kleisli_iterate(c, n: int, tag: Monad, impls: Mapping[str, OperationImpl]):
    m = tag.unit(c)
    for _ in range(n):
        m = step_all(m, tag, impls)
    return m


def is_result(tag: Monad, m) -> bool:
    return all(is_result_payload(c) for c in tag.payloads(m))


def res_extract(m, tag: Monad):
    return tag.bind(m, lambda c: tag.unit(c) if is_result_payload(c) else tag.bottom())


# ---------------------------------------------------------------- outcomes


@dataclass(frozen=True)
class Converged:
    result: object
    steps: int


@dataclass(frozen=True)
class Diverged:
    budget: int


@dataclass(frozen=True)
class Chain:
    entries: tuple
    converged: bool
    increasing: bool


def finitary_sem(e: Expression, budget: int, tag: Monad, impls: Mapping[str, OperationImpl]):
    m = tag.unit(ExpC(e))
    for k in range(budget + 1):
        if is_result(tag, m):
            return Converged(res_extract(m, tag), k)
        if k < budget:
            m = step_all(m, tag, impls)
    return Diverged(budget)


def trace(e: Expression, budget: int, tag: Monad, impls: Mapping[str, OperationImpl]) -> list:
    """Monadic configurations from ``unit(e)`` until a result or the budget."""
    m = tag.unit(ExpC(e))
    out = [m]
    for _ in range(budget):
        if is_result(tag, m):
            break
        m = step_all(m, tag, impls)
        out.append(m)
    return out


class NotIncreasing(AssertionError):
    def __init__(self, index: int, before, after) -> None:
        super().__init__(f"approximant chain is not increasing at step {index}: {before!r} then {after!r}")
        self.index, self.before, self.after = index, before, after


def approximant_chain(
    e: Expression,
    max_n: int,
    tag: Monad,
    impls: Mapping[str, OperationImpl],
    check_order: bool = True,
) -> Chain:
    """``res`` of each iterate up to ``max_n``.

    With the prefix order on lists the chain can decrease, when a branch
    to the left of a finished result finishes later; ``check_order=False``
    reports that in ``Chain.increasing`` instead of raising.
    """
    m = tag.unit(ExpC(e))
    entries = [res_extract(m, tag)]
    converged = False
    for _ in range(max_n):
        if is_result(tag, m):
            entries.append(entries[-1])
            converged = True
            continue
        m = step_all(m, tag, impls)
        entries.append(res_extract(m, tag))
    converged = converged or (len(entries) > 1 and entries[-1] == entries[-2] and is_result(tag, m))
    bad = next((i for i, (a, b) in enumerate(zip(entries, entries[1:])) if not tag.order_leq(a, b)), None)
    if bad is not None and check_order:
        raise NotIncreasing(bad + 1, entries[bad], entries[bad + 1])
    increasing = bad is None
    return Chain(tuple(entries), converged, increasing)
