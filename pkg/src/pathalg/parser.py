"""Recursive-descent parser for operator expressions.

Grammar (whitespace insignificant)::

    expr   := term (('+' | '-') term)*
    term   := ['-'] factor ('*' factor)*
    factor := primary ('^' UINT)*
    primary:= RATIONAL | 'x' INT | 'D' INT | '[' expr ',' expr ']' | '(' expr ')'

The leading ``-`` of a term is an extension so that printed normal forms
parse back.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import IndexOutOfRange, ParseError
from .expr import Add, Bracket, Const, Gen, Mul, Neg, OpExpr, Pow, Sub, Var

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<rat>\d+(?:\s*/\s*\d+)?)|(?P<var>x\d+)|(?P<gen>D\d+)|(?P<op>[-+*^\[\],()])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(s: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m is None:
            raise ParseError(f"unexpected character {s[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind == "ws":
            for k, ch in enumerate(text):
                if ch == "\n":
                    line += 1
                    line_start = pos + k + 1
        else:
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, s: str, n: int | None):
        self.tokens = tokenize(s)
        self.i = 0
        self.n = n

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"{msg}, found {found}", tok.line, tok.col)

    def eat(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind != "op":
            self.fail(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def expr(self) -> OpExpr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            t = self.tok
            self.i += 1
            rhs = self.term()
            node = Add(node, rhs, (t.line, t.col)) if t.text == "+" else Sub(node, rhs, (t.line, t.col))
        return node

    def term(self) -> OpExpr:
        neg = None
        if self.tok.kind == "op" and self.tok.text == "-":
            neg = self.tok
            self.i += 1
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text == "*":
            t = self.tok
            self.i += 1
            node = Mul(node, self.factor(), (t.line, t.col))
        return Neg(node, (neg.line, neg.col)) if neg else node

    def factor(self) -> OpExpr:
        node = self.primary()
        while self.tok.kind == "op" and self.tok.text == "^":
            t = self.tok
            self.i += 1
            if self.tok.kind != "rat" or "/" in self.tok.text:
                self.fail("expected a non-negative integer exponent")
            node = Pow(node, int(self.tok.text), (t.line, t.col))
            self.i += 1
        return node

    def _index(self, tok: Token) -> int:
        k = int(tok.text[1:])
        if k < 1 or (self.n is not None and k > self.n):
            bound = f"1..{self.n}" if self.n is not None else ">= 1"
            raise IndexOutOfRange(
                f"index of {tok.text} out of declared range {bound} (line {tok.line}, column {tok.col})"
            )
        return k

    def primary(self) -> OpExpr:
        t = self.tok
        where = (t.line, t.col)
        if t.kind == "rat":
            self.i += 1
            num, _, den = t.text.replace(" ", "").partition("/")
            if den and int(den) == 0:
                raise ParseError("zero denominator", t.line, t.col)
            return Const(Fraction(int(num), int(den) if den else 1), where)
        if t.kind == "var":
            self.i += 1
            return Var(self._index(t), where)
        if t.kind == "gen":
            self.i += 1
            return Gen(self._index(t), where)
        if t.kind == "op" and t.text == "[":
            self.i += 1
            left = self.expr()
            self.eat(",")
            right = self.expr()
            self.eat("]")
            return Bracket(left, right, where)
        if t.kind == "op" and t.text == "(":
            self.i += 1
            inner = self.expr()
            self.eat(")")
            return inner
        self.fail("expected a number, x<i>, D<i>, '[' or '('")


def parse_expr(s: str, n: int | None = None) -> OpExpr:
    """Parse text into an expression tree; ``n`` bounds the x/D indices."""
    p = _Parser(s, n)
    node = p.expr()
    if p.tok.kind != "eof":
        p.fail("unexpected trailing input")
    return node
