from fractions import Fraction

import pytest

from conftest import app, expr
from effekta.config import preset
from effekta.monads import BOTTOM, Dist, Exc, Out, Val
from effekta.semantics import (
    WRONG, Converged, Diverged, ExpC, NotIncreasing, Raised, SILENT, ValC, approximant_chain,
    finitary_sem, monadic_step, pure_step, res_extract,
)
from effekta.syntax import FALSE, TRUE, UNIT, Return, nat


def run(src, monad, budget=64):
    cfg = preset(monad)
    return finitary_sem(expr(src, monad), budget, cfg.tag, cfg.impls)


def test_pure_steps():
    assert pure_step(expr("do x <- return 2; return x")) is None  # a monadic step
    assert pure_step(expr("if true then return 0 else return 1")) == Return(nat(0))
    assert pure_step(expr("pred(0)")) == Return(nat(0))
    assert pure_step(expr("return 0")) is None


def test_operation_step_carries_label():
    cfg = preset("list")
    m, label = monadic_step(expr("choose()", "list"), cfg.tag, cfg.impls)
    assert label == Raised("choose")
    assert m == (Return(TRUE), Return(FALSE))
    m, label = monadic_step(expr("do x <- return 0; return x", "list"), cfg.tag, cfg.impls)
    assert label is SILENT and m == (Return(nat(0)),)


def test_ill_typed_term_goes_wrong():
    cfg = preset("list")
    r = finitary_sem(expr("true false", "list"), 8, cfg.tag, cfg.impls)
    assert r == Converged((WRONG,), 1)


def test_exception_stops_the_run():
    assert run(app("predfun", 0), "exception").result == Exc("PredZero")
    assert run(app("predfun", 3), "exception").result == Val(ValC(nat(2)))


def test_stop_handler_discards_continuation():
    src = "with {raise_PredZero() =s -> return 0; finally x -> return succ(x)} handle " + app("predfun", 0)
    assert run(src, "exception").result == Val(ValC(nat(0)))


def test_continue_handler_resumes():
    src = "with {write_l2(x) =c -> write_l(x); finally x -> return x} handle (write_l2(5); write_l2(6))"
    assert run(src, "output").result == Out((("l", 5), ("l", 6)), ValC(UNIT))


def test_final_clause_runs_on_the_returned_value():
    src = "with {finally x -> write_l(x)} handle return 3"
    assert run(src, "output").result == Out((("l", 3),), ValC(UNIT))


def test_budget_exhaustion():
    assert run(app("chfun_up", 0), "list", 64) == Diverged(64)


def test_res_extract_drops_unfinished_branches():
    tag = preset("list").tag
    assert res_extract((ValC(nat(0)), ExpC(Return(nat(1)))), tag) == (ValC(nat(0)),)
    tag = preset("distribution").tag
    d = Dist({ValC(nat(0)): Fraction(1, 2), ExpC(Return(nat(1))): Fraction(1, 2)})
    assert res_extract(d, tag) == Dist({ValC(nat(0)): Fraction(1, 2)})
    tag = preset("output").tag
    assert res_extract(Out((("l", 0),), ExpC(Return(UNIT))), tag) == Out((("l", 0),), BOTTOM)


def test_chains_reach_the_finitary_result():
    cfg = preset("distribution")
    e = expr(app("chfun_down", 3), "distribution")
    fin = finitary_sem(e, 64, cfg.tag, cfg.impls)
    chain = approximant_chain(e, fin.steps, cfg.tag, cfg.impls)
    assert chain.entries[-1] == fin.result and chain.increasing


# a left branch that finishes after its right sibling
LATE_LEFT = "do y <- choose(); if y then (do z <- return 0; do w <- return z; return w) else return 1"


def test_list_chain_can_decrease_in_prefix_order():
    cfg = preset("list")
    e = expr(LATE_LEFT, "list")
    with pytest.raises(NotIncreasing):
        approximant_chain(e, 8, cfg.tag, cfg.impls)
    chain = approximant_chain(e, 8, cfg.tag, cfg.impls, check_order=False)
    assert not chain.increasing
    seen = [tuple(c.value for c in m) for m in chain.entries]
    assert (nat(1),) in seen and seen[-1] == (nat(0), nat(1))


def test_output_chain_is_increasing():
    cfg = preset("output")
    chain = approximant_chain(expr(app("wfun_up", 0)), 12, cfg.tag, cfg.impls)
    assert chain.increasing and not chain.converged
