"""Runtime checks of the soundness properties, plus a well-typed term generator.

Each check returns a ``HarnessVerdict``.  ``fail`` is reserved for a real
counterexample; ``undecided`` means some effect inclusion came back
unknown; ``precondition`` means the subject was not a valid input (for
example an ill-typed term).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .checker import Checker, TypeAndEffect, TypeCheckError
from .config import RunConfig
from .effects import EffectAutomaton, Inclusion, eff_atom, eff_concat, eff_epsilon, eff_includes, to_expr
from .interpretations import OMEGA_CPO_KINDS, InterpKind, lift_member
from .library import function
from .monads import ExceptionMonad, Monad, PointedOutputMonad, mrun
from .pretty import show_expr, show_term
from .semantics import (
    Converged, ValC, approximant_chain, finitary_sem, monadic_step, Raised,
)
from .syntax import (
    FALSE, TRUE, UNIT, App, Clause, Do, Expression, Handler, If, OpCall, Prim, RecFun,
    VALUE_TYPES, Return, Value, Var, With, free_vars, nat,
)
from .types import BOOL, BOT, NAT, Type, show_type, subtype
from .types import UNIT as UNIT_T

PASS, FAIL, UNDECIDED, PRECONDITION = "pass", "fail", "undecided", "precondition"


@dataclass
class HarnessVerdict:
    property: str
    subject: str
    verdict: str
    witness: dict = field(default_factory=dict)
    vacuous: bool = False
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return self.verdict in (PASS, UNDECIDED)

    def to_json(self) -> dict:
        out = {"property": self.property, "subject": self.subject, "verdict": self.verdict}
        if self.witness:
            out["witness"] = self.witness
        if self.vacuous:
            out["vacuous"] = True
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    def __str__(self) -> str:
        extra = " (vacuous)" if self.vacuous else ""
        if self.verdict != PASS and self.witness:
            extra += "  " + "; ".join(f"{k}: {v}" for k, v in self.witness.items())
        return f"{self.property:<12} {self.verdict:<12} {self.subject}{extra}"


def _combine(answers: list[Inclusion]) -> str:
    if any(a.no for a in answers):
        return FAIL
    if any(a.unknown for a in answers):
        return UNDECIDED
    return PASS


def _shorten(text: str, limit: int = 160) -> str:
    return text if len(text) <= limit else text[: limit - 3] + "..."


class Harness:
    def __init__(self, config: RunConfig, kind: InterpKind | None = None) -> None:
        self.config = config
        self.tag: Monad = config.tag
        self.impls = config.impls
        self.kind = InterpKind(kind or config.interpretation)
        self.checker = Checker(config.signatures, config.budgets.inclusion)

    # ---- helpers

    def typecheck(self, e: Expression) -> TypeAndEffect:
        return self.checker.infer_expr({}, e)

    def includes(self, a: EffectAutomaton, b: EffectAutomaton) -> Inclusion:
        return eff_includes(a, b, self.config.budgets.inclusion)

    def _pre(self, name: str, e: Expression, err: Exception) -> HarnessVerdict:
        return HarnessVerdict(name, _shorten(show_term(e)), PRECONDITION, {"error": str(err)})

    def _lift(self, m, pred: Callable[[object], bool], eff: EffectAutomaton) -> bool:
        return lift_member(self.kind, self.tag, m, pred, eff, self.impls)

    def _value_pred(self, ty: Type) -> Callable[[object], bool]:
        def pred(c) -> bool:
            if isinstance(c, ValC):
                c = c.value
            elif not isinstance(c, VALUE_TYPES):
                return False
            try:
                return subtype(self.checker.infer_value({}, c), ty).yes
            except TypeCheckError:
                return False
        return pred

    # ---- properties

    def check_progress(self, e: Expression) -> HarnessVerdict:
        try:
            self.typecheck(e)
        except TypeCheckError as err:
            return self._pre("progress", e, err)
        subject = _shorten(show_expr(e))
        if isinstance(e, Return) or monadic_step(e, self.tag, self.impls) is not None:
            return HarnessVerdict("progress", subject, PASS)
        return HarnessVerdict("progress", subject, FAIL, {"stuck": subject})

    def check_step_sr(self, e: Expression) -> HarnessVerdict:
        try:
            te = self.typecheck(e)
        except TypeCheckError as err:
            return self._pre("step-sr", e, err)
        subject = _shorten(show_expr(e))
        r = None if isinstance(e, Return) else monadic_step(e, self.tag, self.impls)
        if r is None:
            return HarnessVerdict("step-sr", subject, PRECONDITION, {"error": "expression does not step"})
        m, label = r
        first = eff_atom(label.op) if isinstance(label, Raised) else eff_epsilon()
        answers: list[Inclusion] = []
        typed: dict = {}
        for e2 in set(self.tag.payloads(m)):
            try:
                te2 = self.checker.infer_expr({}, e2)
            except TypeCheckError as err:
                return HarnessVerdict("step-sr", subject, FAIL,
                                      {"residual": _shorten(show_expr(e2)), "error": str(err)})
            a = subtype(te2.ty, te.ty, self.config.budgets.inclusion)
            b = self.includes(eff_concat(first, te2.eff), te.eff)
            if a.no or b.no:
                return HarnessVerdict("step-sr", subject, FAIL, {
                    "residual": _shorten(show_expr(e2)),
                    "type": f"{show_type(te2.ty)} <= {show_type(te.ty)}: {a.verdict}",
                    "effect": f"{first.describe()} . {te2.eff.describe()} <= {te.eff.describe()}: {b.verdict}",
                })
            answers += [a, b]
            typed[e2] = a.yes and b.yes
        if not self._lift(m, lambda x: typed.get(x, False), first):
            verdict = UNDECIDED if any(a.unknown for a in answers) else FAIL
            return HarnessVerdict("step-sr", subject, verdict, {"lift": f"step result not in lifting of {first.describe()}"})
        return HarnessVerdict("step-sr", subject, _combine(answers))

    def check_run_compat(self) -> HarnessVerdict:
        samples = {NAT: [nat(n) for n in range(6)], BOOL: [TRUE, FALSE], UNIT_T: [UNIT], BOT: []}
        checked = 0
        for name, impl in sorted(self.impls.items()):
            arg_lists: list[tuple] = [()]
            for t in impl.signature.args:
                arg_lists = [a + (v,) for a in arg_lists for v in samples[t]]
            for args in arg_lists:
                m = mrun(impl, args, self.tag)
                if m is None:
                    continue
                checked += 1
                if not self._lift(m, self._value_pred(impl.signature.result), eff_atom(name)):
                    call = f"{name}({', '.join(show_term(a) for a in args)})"
                    return HarnessVerdict("run", self.kind.value, FAIL, {"call": call, "result": repr(m)})
        return HarnessVerdict("run", self.kind.value, PASS, {"calls": checked})

    def check_finitary_soundness(self, e: Expression, budget: int | None = None) -> HarnessVerdict:
        budget = self.config.budgets.steps if budget is None else budget
        try:
            te = self.typecheck(e)
        except TypeCheckError as err:
            return self._pre("finitary", e, err)
        subject = _shorten(show_expr(e))
        r = finitary_sem(e, budget, self.tag, self.impls)
        if not isinstance(r, Converged):
            return HarnessVerdict("finitary", subject, PASS, vacuous=True)
        if self._lift(r.result, self._value_pred(te.ty), te.eff):
            return HarnessVerdict("finitary", subject, PASS, {"steps": r.steps})
        return HarnessVerdict("finitary", subject, FAIL, {
            "result": repr(r.result), "type": show_type(te.ty), "effect": te.eff.describe(),
        })

    def check_infinitary_soundness(self, e: Expression, max_n: int | None = None) -> HarnessVerdict:
        max_n = self.config.budgets.approx if max_n is None else max_n
        try:
            te = self.typecheck(e)
        except TypeCheckError as err:
            return self._pre("infinitary", e, err)
        subject = _shorten(show_expr(e))
        if self.kind not in OMEGA_CPO_KINDS:
            return HarnessVerdict("infinitary", subject, PRECONDITION,
                                  {"error": f"{self.kind.value} is not closed under limits of chains"})
        chain = approximant_chain(e, max_n, self.tag, self.impls, check_order=False)
        pred = self._value_pred(te.ty)
        for n, m in enumerate(chain.entries):
            if not self._lift(m, pred, te.eff):
                return HarnessVerdict("infinitary", subject, FAIL, {"index": n, "approximant": repr(m)})
        return HarnessVerdict("infinitary", subject, PASS, {
            "entries": len(chain.entries), "converged": chain.converged, "increasing": chain.increasing,
        })

    # ---- whole reductions

    def check_reduction(self, e: Expression, budget: int = 50, frontier_cap: int = 32) -> list[HarnessVerdict]:
        """Progress and step subject reduction at every expression reached within ``budget`` steps."""
        out: list[HarnessVerdict] = []
        frontier = [e]
        seen: set = set()
        for _ in range(budget):
            nxt: list[Expression] = []
            for x in frontier:
                if x in seen or isinstance(x, Return):
                    continue
                seen.add(x)
                p = self.check_progress(x)
                out.append(p)
                if p.verdict != PASS:
                    continue
                out.append(self.check_step_sr(x))
                m, _ = monadic_step(x, self.tag, self.impls)
                nxt += [y for y in self.tag.payloads(m) if y not in seen]
            frontier = list(dict.fromkeys(nxt))[:frontier_cap]
            if not frontier:
                break
        return out

    def minimize(self, e: Expression, still_fails: Callable[[Expression], bool]) -> Expression:
        """Greedily descend to the smallest closed subterm that still fails."""
        current = e
        progress = True
        while progress:
            progress = False
            for sub in _closed_children(current):
                try:
                    self.typecheck(sub)
                except TypeCheckError:
                    continue
                if still_fails(sub):
                    current, progress = sub, True
                    break
        return current


def _closed_children(e: Expression) -> Iterator[Expression]:
    if isinstance(e, Do):
        yield e.bound
        if e.var not in free_vars(e.body):
            yield e.body
    elif isinstance(e, If):
        yield e.then
        yield e.orelse
    elif isinstance(e, With):
        yield e.body


# ---------------------------------------------------------------- term generation


class GenerationError(RuntimeError):
    pass


_DATA_TYPES = (NAT, BOOL, UNIT_T)


@dataclass
class TermGenerator:
    """Typing-directed random generation of closed well-typed expressions.

    Recursion only enters through the fixed example functions, so every
    infinite effect is one the inclusion checks decide exactly.
    """

    seed: int
    size_bound: int
    config: RunConfig
    retries: int = 20

    def __post_init__(self) -> None:
        self.rng = random.Random(self.seed)
        self.checker = Checker(self.config.signatures, self.config.budgets.inclusion)
        self._fresh = 0
        tag = self.config.tag
        ops = self.config.impls.values()
        self.raises = sorted(o.name for o in ops if o.kind == "raise")
        self.writes = sorted(o.name for o in ops if o.kind == "write")
        self.chooses = sorted(o.name for o in ops if o.kind == "choose")
        self.templates: dict[Type, list[tuple[str, bool]]] = {NAT: [], UNIT_T: []}
        if isinstance(tag, ExceptionMonad) and "raise_PredZero" in self.config.impls:
            self.templates[NAT].append(("predfun", False))
        if self.chooses == ["choose"]:
            self.templates[NAT] += [("chfun_down", False), ("chfun_up", True)]
        if isinstance(tag, PointedOutputMonad) and {"write_l", "write_l2"} <= set(self.writes):
            self.templates[UNIT_T] += [("wfun_down", False), ("wfun_down_loose", False), ("wfun_up", True)]

    def __iter__(self) -> Iterator[tuple[Expression, TypeAndEffect]]:
        while True:
            yield self.generate()

    def generate(self) -> tuple[Expression, TypeAndEffect]:
        for _ in range(self.retries):
            target = self.rng.choice(_DATA_TYPES)
            try:
                e = self.expr({}, target, self.size_bound)
                te = self.checker.infer_expr({}, e)
            except TypeCheckError:
                continue
            assert subtype(te.ty, target).yes, "generator produced a term above its target type"
            return e, te
        raise GenerationError(f"no well-typed term after {self.retries} attempts")

    # ---- pieces

    def fresh(self, base: str = "x") -> str:
        self._fresh += 1
        return f"{base}{self._fresh}"

    def value(self, ctx: dict[str, Type], ty: Type) -> Value:
        names = [x for x, t in ctx.items() if t == ty]
        if names and self.rng.random() < 0.5:
            return Var(self.rng.choice(names))
        if ty == NAT:
            return nat(self.rng.randint(0, 3))
        if ty == BOOL:
            return self.rng.choice((TRUE, FALSE))
        return UNIT

    def expr(self, ctx: dict[str, Type], ty: Type, size: int) -> Expression:
        if size <= 1:
            return Return(self.value(ctx, ty))
        forms: list[tuple[str, float]] = [("return", 0.5), ("do", 2.5), ("if", 1.0), ("fun", 1.0), ("with", 1.5)]
        if ty in (NAT, BOOL):
            forms.append(("prim", 0.8))
        if self.raises:
            forms.append(("raise", 0.4))
        if (ty == BOOL and self.chooses) or (ty == UNIT_T and self.writes):
            forms.append(("op", 2.0))
        if self.chooses or self.writes:
            forms.append(("effect", 2.0))
        if self.templates.get(ty):
            forms.append(("template", 1.2))
        names, weights = zip(*forms)
        form = self.rng.choices(names, weights)[0]
        return getattr(self, "_" + form)(ctx, ty, size)

    def _return(self, ctx, ty, size):
        return Return(self.value(ctx, ty))

    def _do(self, ctx, ty, size):
        t1 = self.rng.choice(_DATA_TYPES)
        s1 = self.rng.randint(1, max(1, size - 2))
        x = self.fresh()
        bound = self.expr(ctx, t1, s1)
        return Do(x, bound, self.expr({**ctx, x: t1}, ty, max(1, size - 1 - s1)))

    def _if(self, ctx, ty, size):
        half = max(1, (size - 1) // 2)
        return If(self.value(ctx, BOOL), self.expr(ctx, ty, half), self.expr(ctx, ty, half))

    def _prim(self, ctx, ty, size):
        name = "pred" if ty == NAT else self.rng.choice(("iszero", "even"))
        return Prim(name, self.value(ctx, NAT))

    def _raise(self, ctx, ty, size):
        return OpCall(self.rng.choice(self.raises), ())

    def _op(self, ctx, ty, size):
        if ty == BOOL:
            return OpCall(self.rng.choice(self.chooses), ())
        return OpCall(self.rng.choice(self.writes), (self.value(ctx, NAT),))

    def _effect(self, ctx, ty, size):
        # an operation first, then the rest; a coin flip picks between two continuations
        rest = max(1, size - 2)
        if self.chooses and (not self.writes or self.rng.random() < 0.5):
            b = self.fresh("b")
            half = max(1, rest // 2)
            inner = {**ctx, b: BOOL}
            return Do(b, OpCall(self.rng.choice(self.chooses), ()),
                      If(Var(b), self.expr(inner, ty, half), self.expr(inner, ty, half)))
        write = OpCall(self.rng.choice(self.writes), (self.value(ctx, NAT),))
        return Do(self.fresh("u"), write, self.expr(ctx, ty, rest))

    def _fun(self, ctx, ty, size):
        t1 = self.rng.choice(_DATA_TYPES)
        y = self.fresh("y")
        inner = {**ctx, y: t1}
        body = self.expr(inner, ty, size - 2)
        eff = self.checker.infer_expr(inner, body).eff
        annot = eff.expr if eff.expr is not None else to_expr(eff)
        return App(RecFun("_", y, t1, ty, annot, body), self.value(ctx, t1))

    def _template(self, ctx, ty, size):
        name, from_zero = self.rng.choice(self.templates[ty])
        arg = nat(0) if from_zero else self.value(ctx, NAT)
        return App(function(name), arg)

    def _with(self, ctx, ty, size):
        t_in = self.rng.choice(_DATA_TYPES)
        s_body = max(1, (size - 1) * 2 // 3)
        small = max(1, size - 1 - s_body)
        body = self.expr(ctx, t_in, s_body)
        ops = self.raises + self.chooses + self.writes
        clauses = []
        for op in self.rng.sample(ops, k=min(len(ops), self.rng.randint(0, 2))):
            sig = self.config.impls[op].signature
            params = tuple(self.fresh("p") for _ in sig.args)
            cctx = {**ctx, **dict(zip(params, sig.args))}
            if sig.result != BOT and self.rng.random() < 0.5:
                clauses.append(Clause(op, params, self.expr(cctx, sig.result, small), "c"))
            else:
                clauses.append(Clause(op, params, self.expr(cctx, ty, small), "s"))
        x = self.fresh()
        final = self.expr({**ctx, x: t_in}, ty, small)
        return With(Handler(tuple(clauses), x, final), body)
