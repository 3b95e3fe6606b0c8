"""The monad kernel: four built-in monads, operation semantics and orders.

A monad is an object with ``unit``, ``bind`` and ``fmap``.  Elements are
plain immutable Python values:

* exceptions: ``Exc(name)``, ``Val(x)`` or ``BOTTOM``
* lists: tuples, order significant, duplicates allowed
* distributions: ``Dist`` with exact ``Fraction`` weights summing to at most 1
* pointed output: ``Out(word, payload)`` where payload may be ``BOTTOM``
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Sequence

from .syntax import FALSE, TRUE, UNIT, Signature, Value, as_int


class _Bottom:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "BOTTOM"

    def __reduce__(self):
        return (_Bottom, ())


BOTTOM = _Bottom()


@dataclass(frozen=True)
class Exc:
    name: str


@dataclass(frozen=True)
class Val:
    payload: Any


@dataclass(frozen=True)
class Out:
    word: tuple[tuple[str, int], ...]
    payload: Any


class Dist:
    """Finite subdistribution with exact rational weights."""

    __slots__ = ("_w",)

    def __init__(self, weights: dict | Iterable[tuple[Any, Fraction]] = ()) -> None:
        items = weights.items() if isinstance(weights, dict) else weights
        w: dict = {}
        for x, p in items:
            p = Fraction(p)
            if p < 0:
                raise ValueError("negative weight")
            if p:
                w[x] = w.get(x, Fraction(0)) + p
        if sum(w.values(), Fraction(0)) > 1:
            raise ValueError("total mass exceeds 1")
        self._w = w

    def items(self):
        return self._w.items()

    def support(self) -> list:
        return list(self._w)

    def mass(self) -> Fraction:
        return sum(self._w.values(), Fraction(0))

    def __getitem__(self, x) -> Fraction:
        return self._w.get(x, Fraction(0))

    def __len__(self) -> int:
        return len(self._w)

    def __eq__(self, other) -> bool:
        return isinstance(other, Dist) and self._w == other._w

    def __hash__(self) -> int:
        return hash(frozenset(self._w.items()))

    def __repr__(self) -> str:
        return "Dist({" + ", ".join(f"{x!r}: {p}" for x, p in self._w.items()) + "})"


class Monad:
    name = "monad"

    def unit(self, x):
        raise NotImplementedError

    def bind(self, m, f: Callable):
        raise NotImplementedError

    def fmap(self, g: Callable, m):
        return self.bind(m, lambda x: self.unit(g(x)))

    def bottom(self):
        raise NotImplementedError

    def order_leq(self, m1, m2) -> bool:
        raise NotImplementedError

    def payloads(self, m) -> list:
        """The payloads an element carries (excluding bottom)."""
        raise NotImplementedError

    def supports(self, kind: str) -> bool:
        return False

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self) -> int:
        return hash(type(self).__name__)

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class ExceptionMonad(Monad):
    name = "exception"

    def __init__(self, exceptions: Iterable[str] = ()) -> None:
        self.exceptions = tuple(sorted(set(exceptions)))

    def unit(self, x):
        return Val(x)

    def bind(self, m, f):
        return f(m.payload) if isinstance(m, Val) else m

    def fmap(self, g, m):
        return Val(g(m.payload)) if isinstance(m, Val) else m

    def bottom(self):
        return BOTTOM

    def order_leq(self, m1, m2) -> bool:
        return m1 is BOTTOM or m1 == m2

    def payloads(self, m) -> list:
        return [m.payload] if isinstance(m, Val) else []

    def supports(self, kind: str) -> bool:
        return kind == "raise"

    def __repr__(self) -> str:
        return f"ExceptionMonad({list(self.exceptions)})"


class ListMonad(Monad):
    name = "list"

    def unit(self, x):
        return (x,)

    def bind(self, m, f):
        out: list = []
        for x in m:
            out.extend(f(x))
        return tuple(out)

    def fmap(self, g, m):
        return tuple(g(x) for x in m)

    def bottom(self):
        return ()

    def order_leq(self, m1, m2) -> bool:
        return len(m1) <= len(m2) and tuple(m2[: len(m1)]) == tuple(m1)

    def payloads(self, m) -> list:
        return list(m)

    def supports(self, kind: str) -> bool:
        return kind == "choose"


class DistributionMonad(Monad):
    name = "distribution"

    def unit(self, x):
        return Dist({x: Fraction(1)})

    def bind(self, m, f):
        out: dict = {}
        for x, p in m.items():
            for y, q in f(x).items():
                out[y] = out.get(y, Fraction(0)) + p * q
        return Dist(out)

    def fmap(self, g, m):
        return Dist([(g(x), p) for x, p in m.items()])

    def bottom(self):
        return Dist()

    def order_leq(self, m1, m2) -> bool:
        return all(p <= m2[x] for x, p in m1.items())

    def payloads(self, m) -> list:
        return m.support()

    def supports(self, kind: str) -> bool:
        return kind == "choose"


class PointedOutputMonad(Monad):
    name = "output"

    def __init__(self, locations: Iterable[str] = ()) -> None:
        self.locations = tuple(sorted(set(locations)))

    def unit(self, x):
        return Out((), x)

    def bind(self, m, f):
        if m.payload is BOTTOM:
            return m
        n = f(m.payload)
        return Out(m.word + n.word, n.payload)

    def fmap(self, g, m):
        return m if m.payload is BOTTOM else Out(m.word, g(m.payload))

    def bottom(self):
        return Out((), BOTTOM)

    def order_leq(self, m1, m2) -> bool:
        if m1.payload is BOTTOM:
            return m2.word[: len(m1.word)] == m1.word
        return m1 == m2

    def payloads(self, m) -> list:
        return [] if m.payload is BOTTOM else [m.payload]

    def supports(self, kind: str) -> bool:
        return kind == "write"

    def __repr__(self) -> str:
        return f"PointedOutputMonad({list(self.locations)})"


def unit(tag: Monad, x):
    return tag.unit(x)


def bind(tag: Monad, m, f):
    return tag.bind(m, f)


def fmap(tag: Monad, g, m):
    return tag.fmap(g, m)


def bottom(tag: Monad):
    return tag.bottom()


def order_leq(tag: Monad, m1, m2) -> bool:
    return tag.order_leq(m1, m2)


# ---------------------------------------------------------------- operations


@dataclass(frozen=True)
class OperationImpl:
    name: str
    kind: str  # raise | choose | write
    param: str | None  # exception name or location
    signature: Signature


UNDEFINED = None


def mrun(impl: OperationImpl, args: Sequence[Value], tag: Monad):
    """Monadic meaning of an operation call; ``None`` where undefined."""
    if not tag.supports(impl.kind):
        raise ValueError(f"operation kind {impl.kind!r} not available in the {tag.name} monad")
    if impl.kind == "raise":
        return Exc(impl.param)
    if impl.kind == "choose":
        if isinstance(tag, ListMonad):
            return (TRUE, FALSE)
        return Dist({TRUE: Fraction(1, 2), FALSE: Fraction(1, 2)})
    if impl.kind == "write":
        n = as_int(args[0]) if len(args) == 1 else None
        if n is None:
            return UNDEFINED
        return Out(((impl.param, n),), UNIT)
    raise ValueError(f"unknown operation kind {impl.kind!r}")


# ---------------------------------------------------------------- enumeration


def enumerate_elements(tag: Monad, universe: Sequence, size: int = 3, denominator: int = 8) -> Iterator:
    """All elements over ``universe`` within the given bounds.

    ``size`` bounds list length and output word length; distribution
    weights are multiples of ``1/denominator``.
    """
    universe = list(universe)
    if isinstance(tag, ExceptionMonad):
        yield BOTTOM
        for e in tag.exceptions or ("e",):
            yield Exc(e)
        for x in universe:
            yield Val(x)
    elif isinstance(tag, ListMonad):
        for n in range(size + 1):
            for xs in itertools.product(universe, repeat=n):
                yield tuple(xs)
    elif isinstance(tag, DistributionMonad):
        for ks in itertools.product(range(denominator + 1), repeat=len(universe)):
            if sum(ks) <= denominator:
                yield Dist({x: Fraction(k, denominator) for x, k in zip(universe, ks)})
    elif isinstance(tag, PointedOutputMonad):
        locs = tag.locations or ("l",)
        for n in range(size + 1):
            for word in itertools.product(locs, repeat=n):
                w = tuple((loc, 0) for loc in word)
                yield Out(w, BOTTOM)
                for x in universe:
                    yield Out(w, x)
    else:
        raise TypeError(tag)


def kleisli_law_suite(tag: Monad, universe_size: int = 4, **bounds) -> dict[str, list]:
    """Check the three Kleisli laws exhaustively on a small universe.

    Elements range over ``enumerate_elements``; Kleisli arrows range over
    every function from the universe into a small fixed set of elements.
    Returns a map from law name to counterexamples (empty when it holds).
    """
    xs = list(range(universe_size))
    elems = list(enumerate_elements(tag, xs, **bounds))
    targets = _arrow_targets(tag, xs)
    arrows = [dict(zip(xs, choice)) for choice in itertools.product(targets, repeat=len(xs))]
    failures: dict[str, list] = {"left unit": [], "right unit": [], "associativity": []}
    for f in arrows:
        for x in xs:
            if tag.bind(tag.unit(x), f.__getitem__) != f[x]:
                failures["left unit"].append((x, f))
    for m in elems:
        if tag.bind(m, tag.unit) != m:
            failures["right unit"].append(m)
    small = arrows[:: max(1, len(arrows) // 16)]
    for m in elems:
        for f in small:
            for g in small:
                lhs = tag.bind(tag.bind(m, f.__getitem__), g.__getitem__)
                rhs = tag.bind(m, lambda x: tag.bind(f[x], g.__getitem__))
                if lhs != rhs:
                    failures["associativity"].append((m, f, g))
    return failures


def _arrow_targets(tag: Monad, xs: list) -> list:
    a, b = xs[0], xs[-1]
    if isinstance(tag, ExceptionMonad):
        return [Val(a), Val(b), Exc((tag.exceptions or ("e",))[0]), BOTTOM]
    if isinstance(tag, ListMonad):
        return [(), (a,), (b, a)]
    if isinstance(tag, DistributionMonad):
        return [Dist(), Dist({a: Fraction(1)}), Dist({a: Fraction(1, 4), b: Fraction(1, 2)})]
    loc = (tag.locations or ("l",))[0]
    return [Out((), a), Out(((loc, 1),), b), Out(((loc, 2),), BOTTOM)]
