"""Recursive-descent parser for programs, types and effect expressions.

An identifier immediately followed by ``(`` (no whitespace) is an
operation call; ``f (x)`` with a space is an application.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .effects import EPS, Atom, Concat, EffectExpr, Omega, Star, Union
from .syntax import (
    FALSE, PRIMS, TRUE, UNIT, App, Clause, Do, Expression, Handler, If, OpCall, Prim,
    Program, RecFun, Return, Signature, Succ, Value, Var, With, compiled, nat,
)
from .types import BASES, Arrow, Type

KEYWORDS = {
    "return", "do", "if", "then", "else", "with", "handle", "finally", "rec", "fun",
    "unit", "true", "false", "eps", "succ", "Nat", "Bool", "Unit", "Bot", *PRIMS,
}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>\d+)
  | (?P<mode>=[cs](?![A-Za-z0-9_']))
  | (?P<sym>\]->|-\[|->|<-|\^w|[(){},;:!=.|*])
  | (?P<id>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


_VALUE_WORDS = {"unit", "true", "false", "succ", "rec", "fun"}


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int) -> None:
        super().__init__(f"{line}:{col}: {msg}")
        self.line, self.col = line, col


@dataclass(frozen=True)
class Token:
    kind: str  # num | id | sym | mode | eof
    text: str
    line: int
    col: int
    glued: bool  # no whitespace before this token


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, col = 0, 1, 1
    glued = False
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ws":
            glued = False
        else:
            out.append(Token(kind, chunk, line, col, glued))
            glued = True
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    out.append(Token("eof", "", line, col, False))
    return out


class _Parser:
    def __init__(self, text: str, signatures: Mapping[str, Signature] | None) -> None:
        self.toks = tokenize(text)
        self.i = 0
        self.sigs = signatures

    # ---- helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        t = tok or self.tok
        return ParseError(msg, t.line, t.col)

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("sym", "id", "mode") and self.tok.text in texts

    def expect(self, text: str) -> Token:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "id" or t.text in KEYWORDS:
            raise self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        self.i += 1
        return t.text

    def equals(self) -> None:
        # "=c" and "=s" lex as mode tokens; after a rec header they mean "=" then an identifier
        if self.tok.kind == "mode":
            t = self.tok
            self.toks[self.i] = Token("id", t.text[1], t.line, t.col + 1, True)
            return
        self.expect("=")

    # ---- effect expressions

    def effexpr(self) -> EffectExpr:
        e = self.eff_cat()
        while self.at("|"):
            self.i += 1
            e = Union(e, self.eff_cat())
        return e

    def eff_cat(self) -> EffectExpr:
        e = self.eff_post()
        while self.at("."):
            self.i += 1
            e = Concat(e, self.eff_post())
        return e

    def eff_post(self) -> EffectExpr:
        e = self.eff_atom()
        while self.at("*", "^w"):
            e = Star(e) if self.tok.text == "*" else Omega(e)
            self.i += 1
        return e

    def eff_atom(self) -> EffectExpr:
        if self.at("("):
            self.i += 1
            e = self.effexpr()
            self.expect(")")
            return e
        if self.at("eps"):
            self.i += 1
            return EPS
        return Atom(self.ident())

    # ---- types

    def type_(self) -> Type:
        t = self.type_atom()
        if self.at("-["):
            self.i += 1
            eff = self.effexpr()
            self.expect("]->")
            return Arrow(t, compiled(eff), self.type_())
        return t

    def type_atom(self) -> Type:
        if self.at("("):
            self.i += 1
            t = self.type_()
            self.expect(")")
            return t
        if self.tok.kind == "id" and self.tok.text in BASES:
            self.i += 1
            return BASES[self.toks[self.i - 1].text]
        raise self.error(f"expected a type, found {self.tok.text or 'end of input'!r}")

    # ---- values

    def value(self) -> Value:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return nat(int(t.text))
        if self.at("unit"):
            self.i += 1
            return UNIT
        if self.at("true"):
            self.i += 1
            return TRUE
        if self.at("false"):
            self.i += 1
            return FALSE
        if self.at("succ"):
            self.i += 1
            self.expect("(")
            v = self.value()
            self.expect(")")
            return Succ(v)
        if self.at("rec", "fun"):
            return self.function()
        if self.at("("):
            self.i += 1
            v = self.value()
            self.expect(")")
            return v
        t = self.tok
        name = self.ident()
        if name == "_":
            raise self.error("'_' cannot be used as a variable", t)
        return Var(name)

    def function(self) -> RecFun:
        is_rec = self.tok.text == "rec"
        self.i += 1
        fname = self.ident() if is_rec else "_"
        self.expect("(")
        x = self.ident()
        self.expect(":")
        pt = self.type_()
        self.expect(")")
        self.expect(":")
        rt = self.type_()
        self.expect("!")
        eff = self.effexpr()
        if is_rec:
            self.equals()
        else:
            self.expect("->")
        body = self.expr()
        return RecFun(fname, x, pt, rt, eff, body)

    # ---- expressions

    def expr(self) -> Expression:
        if self.at("do"):
            self.i += 1
            x = self.ident()
            self.expect("<-")
            bound = self.nonseq()
            self.expect(";")
            return Do(x, bound, self.expr())
        e = self.nonseq()
        # "; finally" closes a handler's clause list rather than sequencing
        if self.at(";") and self.peek().text != "finally":
            self.i += 1
            return Do("_", e, self.expr())
        return e

    def nonseq(self) -> Expression:
        t = self.tok
        if self.at("do"):
            return self.expr()
        if self.at("return"):
            self.i += 1
            return Return(self.value())
        if self.at("if"):
            self.i += 1
            c = self.value()
            self.expect("then")
            a = self.nonseq()
            self.expect("else")
            return If(c, a, self.nonseq())
        if self.at("with"):
            self.i += 1
            h = self.handler()
            self.expect("handle")
            return With(h, self.nonseq())
        if t.kind == "id" and t.text in PRIMS:
            self.i += 1
            self.expect("(")
            v = self.value()
            self.expect(")")
            return Prim(t.text, v)
        if t.kind == "id" and t.text not in KEYWORDS and self.peek().text == "(" and self.peek().glued:
            return self.opcall()
        if self.at("("):
            save = self.i
            try:
                fn = self.value()
                arg = self.value()
                return App(fn, arg)
            except ParseError:
                self.i = save
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "num" or (t.kind == "id" and (t.text not in KEYWORDS or t.text in _VALUE_WORDS)):
            fn = self.value()
            if self.at(";", ")", "}", ",", "else", "then", "handle") or self.tok.kind == "eof":
                raise self.error("a bare value is not an expression; write 'return v'", t)
            return App(fn, self.value())
        raise self.error(f"expected an expression, found {t.text or 'end of input'!r}")

    def opcall(self) -> OpCall:
        t = self.tok
        op = self.ident()
        self.expect("(")
        args: list[Value] = []
        if not self.at(")"):
            args.append(self.value())
            while self.at(","):
                self.i += 1
                args.append(self.value())
        self.expect(")")
        if self.sigs is not None:
            sig = self.sigs.get(op)
            if sig is None:
                raise self.error(f"undeclared operation {op!r}", t)
            if len(sig.args) != len(args):
                raise self.error(f"operation {op!r} expects {len(sig.args)} argument(s), got {len(args)}", t)
        return OpCall(op, tuple(args))

    def handler(self) -> Handler:
        self.expect("{")
        clauses: list[Clause] = []
        seen: set[str] = set()
        if self.at(";"):
            self.i += 1
        while not self.at("finally"):
            t = self.tok
            op = self.ident()
            if op in seen:
                raise self.error(f"duplicate clause for operation {op!r}", t)
            seen.add(op)
            self.expect("(")
            params: list[str] = []
            if not self.at(")"):
                params.append(self.ident())
                while self.at(","):
                    self.i += 1
                    params.append(self.ident())
            self.expect(")")
            if self.tok.kind != "mode":
                raise self.error("expected clause mode '=c' or '=s'")
            mode = self.tok.text[1]
            self.i += 1
            self.expect("->")
            body = self.nonseq()
            if self.sigs is not None:
                sig = self.sigs.get(op)
                if sig is None:
                    raise self.error(f"undeclared operation {op!r}", t)
                if len(sig.args) != len(params):
                    raise self.error(f"clause for {op!r} binds {len(params)} parameter(s), operation takes {len(sig.args)}", t)
            clauses.append(Clause(op, tuple(params), body, mode))
            if self.at(","):
                self.i += 1
                continue
            self.expect(";")
        self.expect("finally")
        x = self.ident()
        self.expect("->")
        final = self.expr()
        self.expect("}")
        return Handler(tuple(clauses), x, final)

    def done(self) -> None:
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")


def parse_program(text: str, signatures: Mapping[str, Signature]) -> Program:
    p = _Parser(text, signatures)
    e = p.expr()
    p.done()
    return Program(dict(signatures), e)


def parse_expr(text: str, signatures: Mapping[str, Signature] | None = None) -> Expression:
    p = _Parser(text, signatures)
    e = p.expr()
    p.done()
    return e


def parse_value(text: str) -> Value:
    p = _Parser(text, None)
    v = p.value()
    p.done()
    return v


def parse_type(text: str) -> Type:
    p = _Parser(text, None)
    t = p.type_()
    p.done()
    return t


def parse_effect(text: str) -> EffectExpr:
    p = _Parser(text, None)
    e = p.effexpr()
    p.done()
    return e
