import pytest

from conftest import expr
from effekta import library as L
from effekta.config import preset
from effekta.harness import TermGenerator
from effekta.parser import ParseError, parse_expr, parse_type, parse_value
from effekta.pretty import show_expr, show_value
from effekta.syntax import App, Do, OpCall, Return, Succ, Var, ZERO, nat, substitute, free_vars
from effekta.types import NAT, Arrow, show_type


def test_numerals_and_sequencing():
    e = expr("write_l(2); return 0")
    assert isinstance(e, Do) and e.bound == OpCall("write_l", (nat(2),))
    assert e.body == Return(ZERO)
    assert nat(2) == Succ(Succ(ZERO))


def test_library_functions_round_trip():
    for name in L.FUNCTIONS:
        f = L.function(name)
        assert parse_value(show_value(f)) == f


@pytest.mark.parametrize("monad", ["exception", "list", "distribution", "output"])
def test_generated_terms_round_trip(monad):
    cfg = preset(monad)
    gen = TermGenerator(7, 12, cfg)
    for _ in range(60):
        e, _ = gen.generate()
        # unused binders print as "e1; e2" and come back as "_", so compare printed forms
        text = show_expr(e)
        assert show_expr(parse_expr(text, cfg.signatures)) == text


def test_arrow_types_print_with_latent_effect():
    t = parse_type("Nat -[eps | raise_e]-> Nat -[choose]-> Bool")
    assert isinstance(t, Arrow) and isinstance(t.result, Arrow)
    assert parse_type(show_type(t)) == t
    inner = parse_type("(Nat -[eps]-> Nat) -[eps]-> Nat").param
    assert isinstance(inner, Arrow) and inner.param == NAT and inner.result == NAT


@pytest.mark.parametrize("text,line,col", [
    ("return", 1, 7),
    ("do x <- return 0;\n  if x then", 2, 12),
    ("return 0 0", 1, 10),
])
def test_parse_errors_carry_positions(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert (info.value.line, info.value.col) == (line, col)


def test_undeclared_operation_rejected():
    with pytest.raises(ParseError, match="undeclared_op"):
        parse_expr("undeclared_op()", preset("list").signatures)


def test_substitution_avoids_capture():
    e = parse_expr("do y <- return x; return y")
    out = substitute(e, {"x": Var("y")})
    assert free_vars(out) == {"y"}
    assert isinstance(out, Do) and out.var != "y"


def test_application_shows_function_in_parens():
    e = App(L.function("predfun"), nat(1))
    assert show_expr(e).startswith("(fun (x: Nat)")
