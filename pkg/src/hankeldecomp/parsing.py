"""Recursive-descent parser for polynomial expressions with rational coefficients.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/')? unary)*        # juxtaposition multiplies
    unary  := ('+' | '-') unary | power
    power  := atom (('^' | '**') INTEGER)?
    atom   := NUMBER | NAME | '(' expr ')'

Decimals are read exactly (``0.25`` is 1/4).  Division is only allowed by a
nonzero constant.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import NotHomogeneous, PolynomialSyntaxError, UnknownVariable
from .polyring import Polynomial, total_degree

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()]))"
)


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def variables_in_order(text: str) -> List[str]:
    """Variable names in order of first appearance."""
    seen: List[str] = []
    for kind, value, _ in _tokenize(text):
        if kind == "name" and value not in seen:
            seen.append(value)
    return seen


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = list(names)
        self.index = {v: k for k, v in enumerate(self.names)}
        self.n = len(self.names)

    @property
    def tok(self):
        return self.tokens[self.i]

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def at(self, *ops) -> bool:
        kind, value, _ = self.tok
        return kind == "op" and value in ops

    def parse(self) -> Polynomial:
        if self.tok[0] == "end":
            raise PolynomialSyntaxError("empty expression", self.tok[2])
        p = self.expr()
        if self.tok[0] != "end":
            raise PolynomialSyntaxError(f"unexpected {self.tok[1]!r}", self.tok[2])
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.at("+", "-"):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def _starts_factor(self) -> bool:
        kind, value, _ = self.tok
        return kind in ("num", "name") or (kind == "op" and value == "(")

    def term(self) -> Polynomial:
        p = self.unary()
        while True:
            if self.at("*"):
                self.take()
                p = p * self.unary()
            elif self.at("/"):
                pos = self.take()[2]
                q = self.unary()
                if q.is_zero() or any(total_degree(a) for a, _ in q.items()):
                    raise PolynomialSyntaxError("division by a non-constant or zero", pos)
                p = p * (1 / q.coeff((0,) * self.n))
            elif self._starts_factor():
                p = p * self.power()
            else:
                return p

    def unary(self) -> Polynomial:
        if self.at("-"):
            self.take()
            return -self.unary()
        if self.at("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.at("^", "**"):
            self.take()
            kind, value, pos = self.take()
            if kind != "num" or not value.isdigit():
                raise PolynomialSyntaxError("exponent must be a non-negative integer", pos)
            return base ** int(value)
        return base

    def atom(self) -> Polynomial:
        kind, value, pos = self.take()
        if kind == "num":
            return Polynomial.constant(self.n, Fraction(value))
        if kind == "name":
            if value not in self.index:
                raise UnknownVariable(f"unknown variable {value!r} at position {pos}")
            return Polynomial.variable(self.n, self.index[value])
        if kind == "op" and value == "(":
            p = self.expr()
            if not self.at(")"):
                raise PolynomialSyntaxError("expected ')'", self.tok[2])
            self.take()
            return p
        what = "end of input" if kind == "end" else repr(value)
        raise PolynomialSyntaxError(f"unexpected {what}", pos)


def parse_expression(text: str, variables: Optional[Sequence[str]] = None) -> Tuple[Polynomial, List[str]]:
    """Expanded polynomial and the variable names it is written in."""
    names = list(variables) if variables is not None else variables_in_order(text)
    if len(set(names)) != len(names):
        raise ValueError("repeated variable name")
    return _Parser(text, names).parse(), names


def parse_polynomial(text: str, variables: Optional[Sequence[str]] = None) -> Polynomial:
    """Parse a nonzero homogeneous polynomial."""
    poly, names = parse_expression(text, variables)
    if poly.is_zero():
        poly.require_homogeneous()   # raises ZeroPolynomial
    d = poly.degree
    bad = [alpha for alpha, _ in poly.items() if total_degree(alpha) != d]
    if bad:
        shown = ", ".join(Polynomial(poly.nvars, {a: poly.coeff(a)}).to_string(names) for a in bad[:5])
        raise NotHomogeneous(f"terms of degree below {d}: {shown}")
    return poly


def format_polynomial(poly: Polynomial, names: Optional[Sequence[str]] = None) -> str:
    return poly.to_string(names)
