"""Example functions and handlers in concrete syntax.

These are the recursive shapes the term generator splices in, and the
programs the golden tests run.  ``names`` maps each parsed function back
to its short name for abbreviated traces.
"""

from __future__ import annotations

from functools import lru_cache

from .parser import parse_value
from .syntax import RecFun

# raises PredZero on 0, otherwise returns the predecessor
PREDFUN = (
    "(fun (x: Nat): Nat ! eps | raise_PredZero -> "
    "do y <- iszero(x); if y then raise_PredZero() else pred(x))"
)

# counts up from x, stopping at each number with a coin flip; may never stop
CHFUN_UP = (
    "(rec chup (x: Nat): Nat ! choose* . choose = "
    "do y <- choose(); if y then return x else chup succ(x))"
)

# counts down from x to 0, stopping at each number with a coin flip
CHFUN_DOWN = (
    "(rec chdown (x: Nat): Nat ! choose* = "
    "do z <- iszero(x); if z then return x else "
    "(do y <- choose(); if y then return x else do p <- pred(x); chdown p))"
)

# writes x to l and l2, then recurses on x+1 forever
WFUN_UP = (
    "(rec wup (x: Nat): Unit ! (write_l . write_l2)^w = "
    "write_l(x); write_l2(x); wup succ(x))"
)

_WFUN_DOWN_BODY = (
    "write_l(x); write_l2(x); do z <- iszero(x); "
    "if z then return unit else do p <- pred(x); wdown p"
)

# writes x, x-1, ..., 0 to l and l2 in turn; at least one round
WFUN_DOWN = f"(rec wdown (x: Nat): Unit ! (write_l . write_l2) . (write_l . write_l2)* = {_WFUN_DOWN_BODY})"

# the same function with the looser annotation allowing zero rounds
WFUN_DOWN_LOOSE = f"(rec wdown (x: Nat): Unit ! (write_l . write_l2)* = {_WFUN_DOWN_BODY})"

# turns PredZero into the result 0
H_PREDZERO = "{raise_PredZero() =s -> return 0; finally x -> return x}"

# every write to l2 goes to l instead
H_REDIRECT = "{write_l2(x) =c -> write_l(x); finally x -> return x}"

# writes to l2 go to l for odd x and are dropped for even x
H_ODD_ONLY = (
    "{write_l2(x) =c -> do b <- even(x); if b then return unit else write_l(x); "
    "finally x -> return x}"
)

FUNCTIONS = {
    "predfun": PREDFUN,
    "chfun_up": CHFUN_UP,
    "chfun_down": CHFUN_DOWN,
    "wfun_up": WFUN_UP,
    "wfun_down": WFUN_DOWN,
    "wfun_down_loose": WFUN_DOWN_LOOSE,
}


@lru_cache(maxsize=None)
def function(name: str) -> RecFun:
    return parse_value(FUNCTIONS[name])


def names() -> dict[RecFun, str]:
    return {function(n): n for n in FUNCTIONS}
