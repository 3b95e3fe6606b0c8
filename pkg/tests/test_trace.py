from fractions import Fraction

from conftest import app, expr
from effekta import library as L
from effekta.config import preset
from effekta.monads import BOTTOM, Dist, Exc, Out
from effekta.parser import parse_expr
from effekta.pretty import show_expr
from effekta.semantics import ExpC, ValC, trace
from effekta.syntax import nat
from effekta.trace import normalize, normalized_trace, show_element, to_json, trace_lines


def test_show_element_per_monad():
    exc, lst, dist, out = (preset(m).tag for m in ("exception", "list", "distribution", "output"))
    assert show_element(Exc("PredZero"), exc) == "exception PredZero"
    assert show_element(BOTTOM, exc) == "bottom"
    assert show_element((ValC(nat(0)), ValC(nat(1))), lst) == "[0, 1]"
    assert show_element(Dist({ValC(nat(0)): Fraction(1, 2)}), dist) == "{0: 1/2}"
    assert show_element(Out((("l", 0), ("l2", 0)), BOTTOM), out) == "<(l,0)(l2,0), bottom>"


def test_json_records():
    dist = preset("distribution").tag
    rec = to_json(Dist({ValC(nat(1)): Fraction(1, 4)}), dist)
    assert rec == {"distribution": [["1", "1/4"]], "mass": "1/4"}
    assert to_json(Out((), BOTTOM), preset("output").tag) == {"word": [], "payload": None}


def test_raw_trace_lines_are_numbered():
    cfg = preset("exception")
    lines = trace_lines(expr(app("predfun", 1), "exception"), 64, cfg.tag, cfg.impls)
    assert lines[0].startswith("0: ") and lines[-1] == f"{len(lines) - 1}: 0"


def test_printed_configurations_parse_back():
    for monad, src in [("exception", app("predfun", 0)), ("list", app("chfun_down", 2)),
                       ("output", "with {write_l2(x) =c -> write_l(x); finally x -> return x} handle "
                        + app("wfun_down", 1))]:
        cfg = preset(monad)
        for m in trace(expr(src, monad), 64, cfg.tag, cfg.impls):
            for c in cfg.tag.payloads(m):
                if isinstance(c, ExpC):
                    text = show_expr(c.expr)
                    assert show_expr(parse_expr(text, cfg.signatures)) == text


def test_normalize_resugars_tests_on_primitives():
    e = expr("do y <- iszero(1); if y then return 0 else return 1")
    assert show_expr(normalize(e)) == "if iszero(1) then return 0 else return 1"
    assert show_expr(normalize(expr("pred(2)"))) == "return 1"


def test_normalized_trace_abbreviates_library_functions():
    cfg = preset("list")
    lines = normalized_trace(expr(app("chfun_down", 1), "list"), 64, cfg.tag, cfg.impls, L.names())
    assert lines[0] == "[chfun_down 1]"
    assert lines[-1] == "[1, 0]"
    assert len(lines) == len(set(lines))
