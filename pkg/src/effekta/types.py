"""Types and structural subtyping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union as TUnion

from .effects import DEFAULT_BOUNDS, Bounds, EffectAutomaton, Inclusion, YES, eff_includes


@dataclass(frozen=True)
class Base:
    name: str  # Nat | Bool | Unit | Bot

    def __str__(self) -> str:
        return self.name


NAT = Base("Nat")
BOOL = Base("Bool")
UNIT = Base("Unit")
BOT = Base("Bot")
BASES = {t.name: t for t in (NAT, BOOL, UNIT, BOT)}


@dataclass(frozen=True)
class Arrow:
    param: "Type"
    latent: EffectAutomaton
    result: "Type"

    def __str__(self) -> str:
        return show_type(self)


Type = TUnion[Base, Arrow]


def show_type(t: Type, left: bool = False) -> str:
    if isinstance(t, Base):
        return t.name
    s = f"{show_type(t.param, True)} -[{t.latent.describe()}]-> {show_type(t.result)}"
    return f"({s})" if left else s


def _meet(*answers: Inclusion) -> Inclusion:
    for a in answers:
        if a.no:
            return a
    for a in answers:
        if a.unknown:
            return a
    return YES


_NO = Inclusion("no")


def subtype(t1: Type, t2: Type, bounds: Bounds = DEFAULT_BOUNDS) -> Inclusion:
    """Three-valued ``t1 <= t2``; witnesses come from effect inclusion."""
    if t1 == BOT:
        return YES
    if isinstance(t1, Base) or isinstance(t2, Base):
        return YES if t1 == t2 else _NO
    param = subtype(t2.param, t1.param, bounds)
    if param.no:
        return param
    result = subtype(t1.result, t2.result, bounds)
    if result.no:
        return result
    return _meet(param, result, eff_includes(t1.latent, t2.latent, bounds))
