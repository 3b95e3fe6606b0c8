import random

import pytest

from conftest import eff
from effekta.effects import (
    ClauseFilter, HandlerFilter, Lasso, eff_concat, eff_includes, eff_member, eff_union, filter_apply,
)
from filter_oracle import discrepancies, random_effect, random_handler, unroll


def test_unroll_by_hand():
    h = HandlerFilter((ClauseFilter("a", "s", eff("d")),), eff("f"))
    u = unroll(h, eff("b . a . c | b"))
    assert u.done == {("b", "d"), ("b", "f")}


def test_unroll_periodic_inputs():
    h = HandlerFilter((ClauseFilter("a", "c", eff("d . d")),), eff("f"))
    u = unroll(h, eff("(a . b)^w"))
    assert Lasso((), ("d", "d", "b")).canonical() in u.lassos


@pytest.mark.parametrize("seed", range(4))
def test_filter_matches_unrolling(seed):
    rng = random.Random(seed)
    for _ in range(25):
        h, e = random_handler(rng), random_effect(rng)
        assert discrepancies(h, e) == [], (h, e.describe())


def test_oracle_notices_a_wrong_mode():
    # flipping every stop clause to continue must be visible to the comparison
    rng = random.Random(1)
    noticed = 0
    for _ in range(40):
        h, e = random_handler(rng), random_effect(rng)
        if not any(c.mode == "s" for c in h.clauses):
            continue
        flipped = HandlerFilter(tuple(ClauseFilter(c.op, "c", c.effect) if c.mode == "s" else c
                                      for c in h.clauses), h.final)
        u = unroll(h, e)
        a = filter_apply(flipped, e)
        if any(not eff_member(w, a) for w in u.done):
            noticed += 1
    assert noticed > 0


def _widen(rng, h):
    extra = lambda: random_effect(rng, omega=False, star=False)  # noqa: E731
    return HandlerFilter(
        tuple(ClauseFilter(c.op, c.mode, eff_union(c.effect, extra()) if rng.random() < 0.5 else c.effect)
              for c in h.clauses),
        eff_union(h.final, extra()) if rng.random() < 0.5 else h.final,
    )


def test_filter_monotone():
    rng = random.Random(7)
    for _ in range(40):
        h, e = random_handler(rng), random_effect(rng)
        h2 = _widen(rng, h)
        e2 = eff_union(e, random_effect(rng)) if rng.random() < 0.7 else e
        assert not eff_includes(filter_apply(h, e), filter_apply(h2, e2)).no


def test_filter_of_concatenation():
    rng = random.Random(8)
    for _ in range(40):
        h = random_handler(rng)
        e1, e2 = random_effect(rng), random_effect(rng)
        lhs = filter_apply(h, eff_concat(e1, e2))
        inner = filter_apply(h, e2)
        rhs = filter_apply(HandlerFilter(h.clauses, inner), e1)
        assert not eff_includes(rhs, lhs).no
