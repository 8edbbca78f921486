"""Recursive-descent parser for polynomial expressions.

Grammar (LL(1))::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INT)?
    atom   := INT ("/" INT)? | NAME | "(" expr ")"

Implicit multiplication is rejected; ``^`` takes a non-negative integer
literal only.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .polycore import Polynomial

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class PolynomialSyntaxError(ValueError):
    """Raised for malformed input; ``position`` is a 0-based column."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at column {position + 1}")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while text[pos:].strip():
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("INT", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("NAME", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise PolynomialSyntaxError(f"unexpected character {ch!r}", m.start(3), text)
            tokens.append((ch, ch, m.start(3)))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, varnames: Sequence[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.index = {name: k for k, name in enumerate(varnames)}
        self.nvars = len(varnames)

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            self.fail(f"expected {kind!r}, found {tok[1] or 'end of input'!r}", tok)
        self.i += 1
        return tok

    def fail(self, message, tok):
        raise PolynomialSyntaxError(message, tok[2], self.text)

    def parse(self) -> Polynomial:
        if self.peek()[0] == "EOF":
            self.fail("empty expression", self.peek())
        p = self.expr()
        tok = self.peek()
        if tok[0] != "EOF":
            if tok[0] in ("INT", "NAME", "("):
                self.fail("implicit multiplication is not allowed; use '*'", tok)
            self.fail(f"unexpected {tok[1]!r}", tok)
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.peek()[0] == "*":
            self.take()
            p = p * self.unary()
        return p

    def unary(self) -> Polynomial:
        kind = self.peek()[0]
        if kind == "-":
            self.take()
            return -self.unary()
        if kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] == "-":
                self.fail("negative exponent", tok)
            if tok[0] != "INT":
                self.fail("exponent must be a non-negative integer literal", tok)
            self.take()
            return base ** int(tok[1])
        return base

    def atom(self) -> Polynomial:
        tok = self.peek()
        if tok[0] == "INT":
            self.take()
            value = Fraction(int(tok[1]))
            if self.peek()[0] == "/":
                self.take()
                den = self.take("INT")
                if int(den[1]) == 0:
                    self.fail("zero denominator", den)
                value /= int(den[1])
            return Polynomial.constant(value, self.nvars)
        if tok[0] == "NAME":
            self.take()
            if tok[1] not in self.index:
                self.fail(f"unknown variable {tok[1]!r}", tok)
            return Polynomial.variable(self.index[tok[1]], self.nvars)
        if tok[0] == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        self.fail(f"unexpected {tok[1] or 'end of input'!r}", tok)


def parse_expression(text: str, varnames: Sequence[str]) -> Polynomial:
    return _Parser(text, varnames).parse()
