from fractions import Fraction

import pytest

from effekta.config import preset
from effekta.monads import (
    BOTTOM, Dist, DistributionMonad, Exc, ExceptionMonad, ListMonad, Out, PointedOutputMonad,
    Val, enumerate_elements, kleisli_law_suite, mrun,
)
from effekta.syntax import FALSE, TRUE, UNIT, nat

TAGS = [ExceptionMonad(["e", "e2"]), ListMonad(), DistributionMonad(), PointedOutputMonad(["l", "l2"])]


@pytest.mark.parametrize("tag", TAGS, ids=lambda t: t.name)
def test_kleisli_laws_small_universes(tag):
    bounds = {"denominator": 4} if isinstance(tag, DistributionMonad) else {"size": 2}
    for k in (1, 2, 3):
        bad = kleisli_law_suite(tag, k, **bounds)
        assert bad == {"left unit": [], "right unit": [], "associativity": []}


def test_broken_bind_is_caught():
    class Reversing(ListMonad):
        def bind(self, m, f):
            return tuple(reversed(super().bind(m, f)))

    bad = kleisli_law_suite(Reversing(), 2)
    assert bad["right unit"]


def test_exception_bind_short_circuits():
    tag = ExceptionMonad(["e"])
    assert tag.bind(Exc("e"), lambda x: Val(x + 1)) == Exc("e")
    assert tag.bind(BOTTOM, lambda x: Val(x + 1)) is BOTTOM
    assert tag.bind(Val(1), lambda x: Val(x + 1)) == Val(2)


def test_list_order_is_prefix():
    tag = ListMonad()
    assert tag.order_leq((), (1,))
    assert tag.order_leq((1,), (1, 2))
    assert not tag.order_leq((2,), (1, 2))


def test_distribution_order_is_pointwise():
    tag = DistributionMonad()
    half = Dist({0: Fraction(1, 2)})
    assert tag.order_leq(Dist(), half)
    assert tag.order_leq(half, Dist({0: Fraction(1, 2), 1: Fraction(1, 4)}))
    assert not tag.order_leq(Dist({1: Fraction(1, 2)}), half)
    with pytest.raises(ValueError):
        Dist({0: Fraction(3, 4), 1: Fraction(1, 2)})


def test_output_order_extends_words_below_bottom():
    tag = PointedOutputMonad(["l"])
    assert tag.order_leq(Out((("l", 0),), BOTTOM), Out((("l", 0), ("l", 1)), BOTTOM))
    assert tag.order_leq(Out((("l", 0),), BOTTOM), Out((("l", 0),), 5))
    assert not tag.order_leq(Out((("l", 0),), 5), Out((("l", 0), ("l", 1)), 5))
    m = Out((("l", 1),), BOTTOM)
    assert tag.bind(m, lambda x: Out((("l", 2),), x)) == m


def test_mrun_per_operation():
    exc, lst, dist, out = (preset(m) for m in ("exception", "list", "distribution", "output"))
    assert mrun(exc.impls["raise_PredZero"], (), exc.tag) == Exc("PredZero")
    assert mrun(lst.impls["choose"], (), lst.tag) == (TRUE, FALSE)
    assert mrun(dist.impls["choose"], (), dist.tag) == Dist({TRUE: Fraction(1, 2), FALSE: Fraction(1, 2)})
    assert mrun(out.impls["write_l"], (nat(3),), out.tag) == Out((("l", 3),), UNIT)


def test_enumeration_counts():
    assert len(list(enumerate_elements(ListMonad(), [0, 1], size=2))) == 7
    assert len(list(enumerate_elements(DistributionMonad(), [0, 1], denominator=2))) == 6
    assert len(list(enumerate_elements(ExceptionMonad(["e"]), [0, 1]))) == 4
