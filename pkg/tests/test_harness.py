import dataclasses

import pytest

from conftest import app, expr
from effekta.config import preset
from effekta.harness import FAIL, PASS, PRECONDITION, Harness, TermGenerator
from effekta.interpretations import InterpKind
from effekta.pretty import show_expr
from effekta.syntax import Return


def harness(monad, kind=None):
    return Harness(preset(monad), kind)


def test_step_sr_on_choose():
    v = harness("list").check_step_sr(expr("do y <- choose(); if y then return 0 else return 1", "list"))
    assert v.verdict == PASS


def test_step_sr_on_silent_step():
    assert harness("list").check_step_sr(expr("do x <- return 0; return x", "list")).verdict == PASS


def test_step_sr_on_unfolding():
    assert harness("output").check_step_sr(expr(app("wfun_down", 1))).verdict == PASS


def test_step_sr_precondition_on_values_and_ill_typed_terms():
    h = harness("list")
    assert h.check_step_sr(Return(expr("return 0", "list").value)).verdict == PRECONDITION
    assert h.check_progress(expr("true false", "list")).verdict == PRECONDITION


@pytest.mark.parametrize("monad,kind", [
    ("list", "NondetAll01"), ("list", "NondetCount"), ("list", "NondetEx01"),
    ("exception", "ExcSets"), ("output", "OutputExact"), ("output", "OutputLength"),
    ("distribution", "DistSupport"),
])
def test_run_compat(monad, kind):
    v = harness(monad, kind).check_run_compat()
    assert v.verdict == PASS and v.witness["calls"] > 0


def test_finitary_goldens():
    assert harness("exception").check_finitary_soundness(expr(app("predfun", 0), "exception")).verdict == PASS
    handled = "with {raise_PredZero() =s -> return 0; finally x -> return x} handle " + app("predfun", 0)
    v = harness("exception").check_finitary_soundness(expr(handled, "exception"))
    assert v.verdict == PASS and not v.vacuous
    v = harness("list").check_finitary_soundness(expr(app("chfun_down", 3), "list"))
    assert v.verdict == PASS and not v.vacuous


def test_divergence_passes_vacuously():
    v = harness("list").check_finitary_soundness(expr(app("chfun_up", 0), "list"))
    assert v.verdict == PASS and v.vacuous


def test_infinitary_goldens():
    v = harness("output").check_infinitary_soundness(expr(app("wfun_up", 0)), 30)
    assert v.verdict == PASS and not v.witness["converged"]
    v = harness("list", "NondetCount").check_infinitary_soundness(expr(app("chfun_up", 0), "list"), 30)
    assert v.verdict == PASS
    for monad in ("exception", "list", "distribution", "output"):
        assert harness(monad).check_infinitary_soundness(expr("return 0", monad), 5).verdict == PASS


def _sabotaged(monad, op, **changes):
    cfg = preset(monad)
    impls = dict(cfg.impls)
    impls[op] = dataclasses.replace(impls[op], **changes)
    return dataclasses.replace(cfg, impls=impls)


def test_wrong_location_is_caught():
    # write_l now records to l2, so the recorded word no longer matches the effect
    cfg = _sabotaged("output", "write_l", param="l2")
    h = Harness(cfg)
    assert h.check_run_compat().verdict == FAIL
    v = h.check_finitary_soundness(expr("write_l(1); return 0"))
    assert v.verdict == FAIL


def test_wrong_exception_is_caught(monkeypatch):
    import effekta.semantics as sem
    from effekta.monads import Exc

    real = sem.mrun
    monkeypatch.setattr(sem, "mrun", lambda impl, args, tag: Exc("Other") if impl.kind == "raise" else real(impl, args, tag))
    v = harness("exception").check_finitary_soundness(expr(app("predfun", 0), "exception"))
    assert v.verdict == FAIL


def test_dropped_branch_is_caught(monkeypatch):
    import effekta.semantics as sem
    from effekta.syntax import TRUE

    # three answers to a single choose exceed the NondetCount bound of two
    monkeypatch.setattr(sem, "mrun", lambda impl, args, tag: (TRUE, TRUE, TRUE))
    v = harness("list", "NondetCount").check_finitary_soundness(
        expr("do y <- choose(); if y then return 0 else return 1", "list"))
    assert v.verdict == FAIL


def test_generator_is_deterministic():
    cfg = preset("output")
    g1, g2, g3 = (TermGenerator(seed, 12, cfg) for seed in (5, 5, 6))
    run1, run2, run3 = ([show_expr(g.generate()[0]) for _ in range(30)] for g in (g1, g2, g3))
    assert run1 == run2 and run1 != run3


def test_size_one_gives_returns():
    gen = TermGenerator(3, 1, preset("list"))
    assert all(isinstance(gen.generate()[0], Return) for _ in range(50))


@pytest.mark.parametrize("monad", ["exception", "list", "distribution", "output"])
def test_generated_terms_typecheck_at_target(monad):
    gen = TermGenerator(2, 10, preset(monad))
    h = harness(monad)
    for _ in range(40):
        e, te = gen.generate()
        assert h.typecheck(e).ty == te.ty


def test_minimize_descends_to_failing_subterm():
    h = harness("exception")
    e = expr("do x <- return 1; " + app("predfun", 0), "exception")
    raises = lambda sub: "raise" in show_expr(sub) and "do x" not in show_expr(sub)  # noqa: E731
    small = h.minimize(e, raises)
    assert small != e and raises(small)


def test_verdict_json_record():
    v = harness("list").check_finitary_soundness(expr(app("chfun_up", 0), "list"))
    rec = v.to_json()
    assert rec["property"] == "finitary" and rec["verdict"] == "pass" and rec["vacuous"] is True
    assert InterpKind(harness("list").kind) is InterpKind.NONDET_ALL01
