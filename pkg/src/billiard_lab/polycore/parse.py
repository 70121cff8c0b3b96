"""Recursive-descent parser for polynomial text input.

Grammar (whitespace ignored)::

    expr     := ['+'|'-'] term (('+'|'-') term)*
    term     := factor (('*' factor) | ('/' factor))*
    factor   := base ('^' nonneg-int)?
    base     := variable | rational | '(' expr ')'
    rational := int ('/' posint)?

Division is accepted only by a nonzero constant, so ``x^2/4`` works.
Juxtaposition such as ``2x`` is rejected.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .poly import BivariatePolynomial, HomogeneousPolynomial, _SparsePolynomial


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownVariableError(ParseError):
    pass


class NonRationalLiteralError(ParseError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "num" and not value.isdigit():
            raise NonRationalLiteralError(f"non-rational literal {value!r}", start, text)
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, variables, factory):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = list(variables)
        self.factory = factory

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2], self.text)

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        result = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[0] in ("num", "name") or tok[1] == "(":
                self.error("implicit multiplication is not allowed; use '*'")
            self.error(f"unexpected token {tok[1]!r}")
        return result

    def expr(self):
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if tok[1] == "+" else acc - rhs
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.take()
                acc = acc * self.factor()
            elif tok[0] == "op" and tok[1] == "/":
                self.take()
                den_tok = self.peek()
                den = self.factor()
                const = _as_constant(den)
                if const is None:
                    self.error("division only by a constant", den_tok)
                if const == 0:
                    self.error("division by zero", den_tok)
                acc = acc * (Fraction(1) / const)
            else:
                return acc

    def factor(self):
        base = self.base()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            exp_tok = self.take()
            if exp_tok[0] != "num":
                self.error("exponent must be a nonnegative integer", exp_tok)
            base = base ** int(exp_tok[1])
        return base

    def base(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "num":
            nxt = self.peek()
            if nxt[0] == "name" or (nxt[0] == "op" and nxt[1] == "("):
                self.error("implicit multiplication is not allowed; use '*'", nxt)
            return self.factory.constant(Fraction(int(value)))
        if kind == "name":
            if value not in self.variables:
                raise UnknownVariableError(f"unknown variable {value!r}", pos, self.text)
            return self.factory.variable(self.variables.index(value))
        if kind == "op" and value == "(":
            inner = self.expr()
            close = self.take()
            if close[1] != ")":
                self.error("expected ')'", close)
            return inner
        if kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected token {value!r}", tok)


def _as_constant(p):
    if p.is_zero():
        return Fraction(0)
    if p.total_degree == 0:
        return next(iter(p.terms.values()))
    return None


class _BivFactory:
    def __init__(self, variables):
        self.variables = tuple(variables)

    def constant(self, c):
        return BivariatePolynomial.constant(c, self.variables)

    def variable(self, k):
        return BivariatePolynomial.variable(k, self.variables)


class _MixedHomFactory:
    """Builds bivariate-shaped sparse polys in three variables, homogeneity checked at the end."""

    def constant(self, c):
        return _Tri({(0, 0, 0): c})

    def variable(self, k):
        e = [0, 0, 0]
        e[k] = 1
        return _Tri({tuple(e): 1})


class _Tri(_SparsePolynomial):
    nvars = 3


def parse_polynomial(text: str, variables=("x", "y")) -> BivariatePolynomial:
    """Parse ``text`` into an exact bivariate polynomial in the two named variables."""
    return _Parser(text, variables, _BivFactory(variables)).parse()


def parse_homogeneous(text: str, variables=("x0", "x1", "x2")) -> HomogeneousPolynomial:
    """Parse a ternary form; every term must share one total degree."""
    tri = _Parser(text, variables, _MixedHomFactory()).parse()
    degs = {sum(e) for e in tri.terms}
    if len(degs) > 1:
        raise ParseError(f"not homogeneous: term degrees {sorted(degs)}", 0, text)
    if not degs:
        raise ParseError("zero form has no degree", 0, text)
    return HomogeneousPolynomial(dict(tri.terms))
