"""Recursive-descent parser for the polynomial string grammar.

Integer literals, identifiers, ``+ - * / ^`` and parentheses.  ``^`` takes an
integer exponent, optionally negative (``x1^-2`` or ``x1^(-2)``).  The
parser is representation-agnostic: leaves are produced by callbacks and the
operators are applied with Python arithmetic.
"""

from __future__ import annotations

import re

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        num, ident, op = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            tokens.append(("int", int(num), start))
        elif ident is not None:
            tokens.append(("ident", ident, start))
        else:
            if op not in "+-*/^()":
                raise ParseError(f"unexpected character {op!r}", text, start)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, number, identifier):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.number = number
        self.identifier = identifier

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected {op!r}", self.text, tok[2])

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        value = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return value

    def expr(self):
        tok = self.peek()
        sign = 1
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if tok[1] == "+" else value - rhs
            else:
                return value

    def term(self):
        value = self.unary()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "*/":
                self.take()
                rhs = self.unary()
                if tok[1] == "*":
                    value = value * rhs
                else:
                    try:
                        value = value / rhs
                    except ZeroDivisionError:
                        self.error("division by zero", tok)
            else:
                return value

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            e = self.exponent()
            try:
                return base ** e
            except (ArithmeticError, ValueError) as exc:
                self.error(f"cannot raise to power {e}: {exc}", tok)
        return base

    def exponent(self):
        tok = self.peek()
        paren = tok[0] == "op" and tok[1] == "("
        if paren:
            self.take()
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            sign = -1
        tok = self.take()
        if tok[0] != "int":
            self.error("exponent must be an integer", tok)
        if paren:
            self.expect(")")
        return sign * tok[1]

    def atom(self):
        tok = self.take()
        if tok[0] == "int":
            return self.number(tok[1])
        if tok[0] == "ident":
            try:
                return self.identifier(tok[1])
            except KeyError:
                self.error(f"unknown variable {tok[1]!r}", tok)
        if tok[0] == "op" and tok[1] == "(":
            value = self.expr()
            self.expect(")")
            return value
        self.error("unexpected end of input" if tok[0] == "end" else f"unexpected token {tok[1]!r}", tok)


def parse(text: str, number, identifier):
    """Parse ``text`` using ``number(int)`` and ``identifier(str)`` leaf builders.

    ``identifier`` raises KeyError for unknown names.
    """
    if not isinstance(text, str):
        raise ParseError(f"expected a polynomial string, got {type(text).__name__}")
    return _Parser(text, number, identifier).parse()


def parse_integer_poly(text, var: str = "u") -> list[int]:
    """Coefficients (low degree first) of an integer polynomial in one variable."""
    from .multipoly import PolyRing
    from .rings import IntegerRing

    R = PolyRing(IntegerRing(), (var,))
    f = R.parse(str(text))
    if not hasattr(f, "terms"):
        raise ParseError(f"{text!r} is not a polynomial", str(text))
    if any(e[0] < 0 for e in f.terms):
        raise ParseError(f"{text!r} has negative powers of {var}", str(text))
    deg = max((e[0] for e in f.terms), default=-1)
    out = [0] * (deg + 1)
    for e, c in f.terms.items():
        out[e[0]] = c
    return out
