"""Interpretations of effect types as predicate liftings, one family per monad.

An interpretation maps an effect (an automaton) into a small ordered monoid
via a homomorphism and then lifts a predicate on payloads to a predicate
on monadic elements.  ``lifting_axiom_suite`` checks the lifting laws by
brute force on small universes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

from .effects import (
    EffectAutomaton, accepts_epsilon, eff_concat, eff_epsilon, eff_includes, eff_member,
    is_prefix_of_language,
)
from .monads import (
    BOTTOM, DistributionMonad, Exc, ExceptionMonad, ListMonad, Monad, OperationImpl,
    PointedOutputMonad, enumerate_elements,
)

INF = math.inf
OK = "ok"


class InterpKind(str, Enum):
    EXC_SETS = "ExcSets"
    NONDET_ALL01 = "NondetAll01"
    NONDET_EX01 = "NondetEx01"
    NONDET_COUNT = "NondetCount"
    OUTPUT_LENGTH = "OutputLength"
    OUTPUT_EXACT = "OutputExact"
    DIST_SUPPORT = "DistSupport"


COMPATIBLE = {
    InterpKind.EXC_SETS: ExceptionMonad,
    InterpKind.NONDET_ALL01: ListMonad,
    InterpKind.NONDET_EX01: ListMonad,
    InterpKind.NONDET_COUNT: ListMonad,
    InterpKind.OUTPUT_LENGTH: PointedOutputMonad,
    InterpKind.OUTPUT_EXACT: PointedOutputMonad,
    InterpKind.DIST_SUPPORT: DistributionMonad,
}

# kinds whose lifting contains bottom and is closed under sups of chains;
# every shipped kind qualifies, the set is kept for kinds added later
OMEGA_CPO_KINDS = frozenset(InterpKind)

# kinds meant to exclude wrong from every lifted predicate
MUST_KINDS = frozenset(InterpKind) - {InterpKind.NONDET_EX01}


class InterpretationError(ValueError):
    pass


# ---------------------------------------------------------------- operation kinds


def _op_info(op: str, impls: Mapping[str, OperationImpl] | None) -> tuple[str, str | None]:
    if impls is not None and op in impls:
        return impls[op].kind, impls[op].param
    # conventional names: raise_<exc>, choose, write_<loc>
    if op.startswith("raise_"):
        return "raise", op[len("raise_"):]
    if op == "choose":
        return "choose", None
    if op.startswith("write_"):
        return "write", op[len("write_"):]
    raise InterpretationError(f"cannot classify operation {op!r}")


def _require_kind(a: EffectAutomaton, kind: str, impls) -> None:
    for op in a.alphabet:
        if _op_info(op, impls)[0] != kind:
            raise InterpretationError(f"operation {op!r} is not a {kind} operation")


# ---------------------------------------------------------------- homomorphisms


def hom_exceptions(a: EffectAutomaton, impls: Mapping[str, OperationImpl] | None = None) -> frozenset[str]:
    _require_kind(a, "raise", impls)
    out = {OK} if accepts_epsilon(a) else set()
    # automata are trimmed, so every edge out of the initial state starts an accepted word
    out |= {_op_info(op, impls)[1] for p, op, _ in a.transitions if p == a.initial}
    return frozenset(out)


def hom_nondet01(a: EffectAutomaton, impls: Mapping[str, OperationImpl] | None = None) -> int:
    _require_kind(a, "choose", impls)
    return int(any(p == a.initial for p, _, _ in a.transitions))


def hom_count(a: EffectAutomaton, impls: Mapping[str, OperationImpl] | None = None) -> float:
    _require_kind(a, "choose", impls)
    n = a.sup_length
    return INF if n == INF else 2 ** int(n)


def hom_outlen(a: EffectAutomaton, impls: Mapping[str, OperationImpl] | None = None) -> float:
    _require_kind(a, "write", impls)
    n = a.sup_length
    return INF if n == INF else int(n)


# ---------------------------------------------------------------- liftings


def _check_compatible(kind: InterpKind, tag: Monad) -> None:
    if not isinstance(tag, COMPATIBLE[kind]):
        raise InterpretationError(f"interpretation {kind.value} does not fit the {tag.name} monad")


def _location_ops(impls: Mapping[str, OperationImpl] | None) -> dict[str, str]:
    if impls is None:
        return {}
    return {i.param: name for name, i in impls.items() if i.kind == "write"}


def extract(word, impls: Mapping[str, OperationImpl] | None = None) -> tuple[str, ...]:
    """The operation sequence an output word records."""
    ops = _location_ops(impls)
    return tuple(ops.get(loc, f"write_{loc}") for loc, _ in word)


def lift_member(
    kind: InterpKind | str,
    tag: Monad,
    m,
    pred: Callable[[object], bool],
    a: EffectAutomaton,
    impls: Mapping[str, OperationImpl] | None = None,
) -> bool:
    kind = InterpKind(kind)
    _check_compatible(kind, tag)
    if kind is InterpKind.EXC_SETS:
        if m is BOTTOM:
            return True
        allowed = hom_exceptions(a, impls)
        if isinstance(m, Exc):
            return m.name in allowed
        return OK in allowed and pred(m.payload)
    if kind in (InterpKind.NONDET_ALL01, InterpKind.NONDET_COUNT):
        if kind is InterpKind.NONDET_COUNT:
            bound = hom_count(a, impls)
        else:
            bound = INF if hom_nondet01(a, impls) else 1
        return len(m) <= bound and all(pred(x) for x in m)
    if kind is InterpKind.NONDET_EX01:
        if hom_nondet01(a, impls):
            return len(m) == 0 or any(pred(x) for x in m)
        return len(m) <= 1 and all(pred(x) for x in m)
    if kind is InterpKind.OUTPUT_LENGTH:
        return len(m.word) <= hom_outlen(a, impls) and (m.payload is BOTTOM or pred(m.payload))
    if kind is InterpKind.OUTPUT_EXACT:
        w = extract(m.word, impls)
        if m.payload is BOTTOM:
            return is_prefix_of_language(w, a)
        return eff_member(w, a) and pred(m.payload)
    if kind is InterpKind.DIST_SUPPORT:
        # a cardinality bound on the support is not natural in the payload set,
        # so only the support is constrained
        return all(pred(x) for x in m.support())
    raise InterpretationError(kind)


@dataclass(frozen=True)
class Interpretation:
    kind: InterpKind
    tag: Monad
    impls: Mapping[str, OperationImpl] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", InterpKind(self.kind))
        _check_compatible(self.kind, self.tag)

    def member(self, m, pred: Callable[[object], bool], a: EffectAutomaton) -> bool:
        return lift_member(self.kind, self.tag, m, pred, a, self.impls)

    @property
    def omega_cpo(self) -> bool:
        return self.kind in OMEGA_CPO_KINDS


# ---------------------------------------------------------------- axiom suite


@dataclass
class ConditionResult:
    name: str
    checked: int = 0
    counterexample: object = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def __str__(self) -> str:
        verdict = "pass" if self.passed else f"FAIL  witness: {self.counterexample}"
        return f"{self.name:<14} checked {self.checked:>7}  {verdict}"


@dataclass
class AxiomReport:
    kind: InterpKind
    universe: int
    conditions: dict[str, ConditionResult]

    def passed(self, name: str) -> bool:
        return self.conditions[name].passed

    def __str__(self) -> str:
        head = f"{self.kind.value} (universe <= {self.universe})"
        return "\n".join([head] + ["  " + str(c) for c in self.conditions.values()])


CONDITIONS = ("natural", "monotone", "unit", "multiplication", "direct image", "bottom")


def _subsets(xs: Sequence) -> list[frozenset]:
    return [frozenset(c) for r in range(len(xs) + 1) for c in itertools.combinations(xs, r)]


def _functions(xs: Sequence, ys: Sequence) -> Iterable[dict]:
    for image in itertools.product(ys, repeat=len(xs)):
        yield dict(zip(xs, image))


def default_samples(kind: InterpKind) -> tuple[Monad, dict[str, OperationImpl], list[EffectAutomaton]]:
    """A monad instance, operations and effect samples suited to ``kind``."""
    from .parser import parse_effect
    from .syntax import Signature, compiled
    from .types import BOOL, BOT, NAT, UNIT

    if kind is InterpKind.EXC_SETS:
        tag: Monad = ExceptionMonad(["e", "e2"])
        impls = {f"raise_{x}": OperationImpl(f"raise_{x}", "raise", x, Signature((), BOT)) for x in ("e", "e2")}
        texts = ["eps", "raise_e", "eps | raise_e", "raise_e . raise_e2", "eps | raise_e | raise_e2"]
    elif kind is InterpKind.DIST_SUPPORT or COMPATIBLE[kind] is ListMonad:
        tag = DistributionMonad() if kind is InterpKind.DIST_SUPPORT else ListMonad()
        impls = {"choose": OperationImpl("choose", "choose", None, Signature((), BOOL))}
        texts = ["eps", "choose", "eps | choose", "choose . choose", "choose*", "choose^w"]
    else:
        tag = PointedOutputMonad(["l", "l2"])
        impls = {f"write_{x}": OperationImpl(f"write_{x}", "write", x, Signature((NAT,), UNIT)) for x in ("l", "l2")}
        texts = ["eps", "write_l", "eps | write_l", "write_l . write_l2", "write_l*", "(write_l . write_l2)^w"]
    return tag, impls, [compiled(parse_effect(t)) for t in texts]


def _bounds_for(tag: Monad) -> dict:
    # one bound for every universe, so preimages of enumerated elements are enumerated too
    if isinstance(tag, DistributionMonad):
        return {"denominator": 4}
    if isinstance(tag, PointedOutputMonad):
        return {"size": 2}
    return {"size": 3}


def lifting_axiom_suite(
    kind: InterpKind | str,
    universe_size: int = 3,
    effects: Sequence[EffectAutomaton] | None = None,
    tag: Monad | None = None,
    impls: Mapping[str, OperationImpl] | None = None,
) -> AxiomReport:
    """Brute-force check of the lifting conditions on universes up to ``universe_size``.

    Conditions: natural in the payload set, monotone in the effect, unit,
    multiplication, direct image (the must condition) and bottom membership.
    """
    kind = InterpKind(kind)
    d_tag, d_impls, d_effects = default_samples(kind)
    tag = tag or d_tag
    impls = d_impls if impls is None else impls
    effects = list(d_effects if effects is None else effects)
    _check_compatible(kind, tag)
    res = {name: ConditionResult(name) for name in CONDITIONS}

    def lift(m, a_set, eff) -> bool:
        return lift_member(kind, tag, m, a_set.__contains__, eff, impls)

    def fail(name: str, witness) -> None:
        if res[name].counterexample is None:
            res[name].counterexample = witness

    universes = [tuple(range(n)) for n in range(1, universe_size + 1)]
    elems = {u: list(enumerate_elements(tag, u, **_bounds_for(tag))) for u in universes}
    eps = eff_epsilon()

    # (1) naturality: lift_X(f^-1 A) = (Mf)^-1 lift_Y(A)
    for xs in universes:
        for ys in universes:
            for f in _functions(xs, ys):
                mapped = [(m, tag.fmap(f.__getitem__, m)) for m in elems[xs]]
                for a_set in _subsets(ys):
                    pre = frozenset(x for x in xs if f[x] in a_set)
                    for eff in effects:
                        for m, fm in mapped:
                            res["natural"].checked += 1
                            if lift(m, pre, eff) != lift(fm, a_set, eff):
                                fail("natural", (m, f, set(a_set), eff.describe()))

    # (2) monotonicity along proven inclusions
    xs = universes[-1]
    for e1, e2 in itertools.product(effects, repeat=2):
        if not eff_includes(e1, e2).yes:
            continue
        for a_set in _subsets(xs):
            for m in elems[xs]:
                res["monotone"].checked += 1
                if lift(m, a_set, e1) and not lift(m, a_set, e2):
                    fail("monotone", (m, set(a_set), e1.describe(), e2.describe()))

    # (3) unit
    for a_set in _subsets(xs):
        for x in a_set:
            res["unit"].checked += 1
            if not lift(tag.unit(x), a_set, eps):
                fail("unit", (x, set(a_set)))

    # (4) multiplication: lift^E_{MX}(lift^E'_X(A)) is inside mu^-1 lift^{E.E'}_X(A)
    inner_xs = universes[min(1, len(universes) - 1)]
    inner = list(enumerate_elements(tag, inner_xs, **_inner_bounds(tag)))
    outer = list(enumerate_elements(tag, inner, **_outer_bounds(tag)))
    for e1, e2 in itertools.product(effects, repeat=2):
        e12 = eff_concat(e1, e2)
        for a_set in _subsets(inner_xs):
            good_inner = frozenset(i for i in inner if lift(i, a_set, e2))
            for mm in outer:
                res["multiplication"].checked += 1
                if lift(mm, good_inner, e1) and not lift(tag.bind(mm, lambda i: i), a_set, e12):
                    fail("multiplication", (mm, set(a_set), e1.describe(), e2.describe()))

    # (5) direct image: lift_Y(f A) is inside (Mf) lift_X(A)
    for xs in universes:
        for ys in universes:
            for f in _functions(xs, ys):
                for a_set in _subsets(xs):
                    image = frozenset(f[x] for x in a_set)
                    for eff in effects:
                        reached = {tag.fmap(f.__getitem__, m) for m in elems[xs] if lift(m, a_set, eff)}
                        for n in elems[ys]:
                            res["direct image"].checked += 1
                            if lift(n, image, eff) and n not in reached:
                                fail("direct image", (n, f, set(a_set), eff.describe()))

    # bottom belongs to every lifted predicate
    for eff in effects:
        for a_set in _subsets(xs):
            res["bottom"].checked += 1
            if not lift(tag.bottom(), a_set, eff):
                fail("bottom", (set(a_set), eff.describe()))

    return AxiomReport(kind, universe_size, res)


def _inner_bounds(tag: Monad) -> dict:
    if isinstance(tag, DistributionMonad):
        return {"denominator": 2}
    return {"size": 2}


def _outer_bounds(tag: Monad) -> dict:
    if isinstance(tag, DistributionMonad):
        return {"denominator": 2}
    return {"size": 2}
