"""Exact sparse multivariate polynomials over Q and the apolar pairing.

A monomial is a tuple of non-negative exponents (a multi-index).  A
:class:`Polynomial` maps multi-indices to nonzero ``Fraction`` coefficients.
The term-level helpers (``mul_terms``, ``power_terms`` ...) are written against
plain dicts so the numeric layers can reuse them with complex coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations_with_replacement
from math import factorial
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    DegreeExceeded,
    DimensionMismatch,
    NotHomogeneous,
    NotInvertible,
    ZeroPolynomial,
)
from . import qlinalg

MultiIndex = Tuple[int, ...]
Terms = Dict[MultiIndex, object]


# ---------------------------------------------------------------- multi-indices

def total_degree(alpha: MultiIndex) -> int:
    return sum(alpha)


def grlex_key(alpha: MultiIndex):
    """Sort key for graded-lex order with x_1 > x_2 > ... (ascending)."""
    return (sum(alpha), alpha)


def basis_key(alpha: MultiIndex):
    """Degree first, then the larger monomial first: 1, y, z, y^2, yz, z^2, ..."""
    return (sum(alpha), tuple(-a for a in alpha))


def unit(n: int, i: int) -> MultiIndex:
    return tuple(int(j == i) for j in range(n))


def add_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def monomials_of_degree(n: int, d: int) -> List[MultiIndex]:
    """All exponent vectors in n variables of total degree exactly d, in basis order."""
    if n == 0:
        return [()] if d == 0 else []
    out = []
    for combo in combinations_with_replacement(range(n), d):
        alpha = [0] * n
        for i in combo:
            alpha[i] += 1
        out.append(tuple(alpha))
    return sorted(out, key=basis_key)


def monomials_up_to(n: int, d: int) -> List[MultiIndex]:
    return [a for k in range(d + 1) for a in monomials_of_degree(n, k)]


def multinomial(d: int, alpha: MultiIndex) -> int:
    """d! / (alpha! (d - |alpha|)!), the affine multinomial coefficient."""
    k = sum(alpha)
    if k > d:
        raise DegreeExceeded(f"|alpha| = {k} exceeds d = {d}")
    den = factorial(d - k)
    for a in alpha:
        den *= factorial(a)
    return factorial(d) // den


# ---------------------------------------------------------- dict-level algebra

def add_terms(a: Mapping, b: Mapping, scale=1) -> Terms:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + scale * c
        if v == 0:
            out.pop(m, None)
        else:
            out[m] = v
    return out


def mul_terms(a: Mapping, b: Mapping) -> Terms:
    out: Terms = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = add_index(ma, mb)
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c != 0}


def power_terms(coeffs: Sequence, d: int) -> Terms:
    """Multinomial expansion of (sum_i coeffs[i] x_i)^d."""
    n = len(coeffs)
    out: Terms = {}
    for alpha in monomials_of_degree(n, d):
        c = multinomial(d, alpha)
        val = c
        for ci, a in zip(coeffs, alpha):
            if a:
                val = val * ci ** a
        if val != 0:
            out[alpha] = val
    return out


def substitute_terms(terms: Mapping, rows: Sequence[Sequence], new_nvars: int) -> Terms:
    """Substitute x_i -> sum_j rows[i][j] y_j into a term dict."""
    zero = (0,) * new_nvars
    forms = [{unit(new_nvars, j): c for j, c in enumerate(row) if c != 0} for row in rows]
    pow_cache: Dict[Tuple[int, int], Terms] = {}

    def power(i, e):
        key = (i, e)
        if key not in pow_cache:
            if e == 0:
                pow_cache[key] = {zero: 1}
            else:
                pow_cache[key] = mul_terms(power(i, e - 1), forms[i])
        return pow_cache[key]

    prefix_cache: Dict[MultiIndex, Terms] = {(): {zero: 1}}

    def prefix(alpha):
        if alpha not in prefix_cache:
            prefix_cache[alpha] = mul_terms(prefix(alpha[:-1]), power(len(alpha) - 1, alpha[-1]))
        return prefix_cache[alpha]

    out: Terms = {}
    for alpha, c in sorted(terms.items()):
        out = add_terms(out, prefix(alpha), c)
    return out


# ----------------------------------------------------------------- Polynomial

class Polynomial:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Mapping[MultiIndex, object]] = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != nvars or any(e < 0 for e in m):
                raise DimensionMismatch(f"bad exponent vector {m} for {nvars} variables")
            c = Fraction(c)
            if c != 0:
                clean[m] = clean.get(m, Fraction(0)) + c
                if clean[m] == 0:
                    del clean[m]
        self.nvars = nvars
        self._terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def constant(cls, nvars: int, value) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        return cls(nvars, {unit(nvars, i): 1})

    @classmethod
    def linear_form(cls, coeffs: Sequence) -> "Polynomial":
        n = len(coeffs)
        return cls(n, {unit(n, i): c for i, c in enumerate(coeffs)})

    @property
    def terms(self) -> Mapping[MultiIndex, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, alpha: MultiIndex) -> Fraction:
        return self._terms.get(tuple(alpha), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        if not self._terms:
            raise ZeroPolynomial("degree of the zero polynomial is undefined")
        return max(sum(m) for m in self._terms)

    @property
    def homogeneous_degree(self) -> Optional[int]:
        degs = {sum(m) for m in self._terms}
        return degs.pop() if len(degs) == 1 else None

    def require_homogeneous(self) -> int:
        if not self._terms:
            raise ZeroPolynomial("zero polynomial")
        d = self.homogeneous_degree
        if d is None:
            top = self.degree
            bad = [m for m in self._terms if sum(m) != top]
            raise NotHomogeneous(f"terms of mixed degree, e.g. {sorted(bad)[:5]}")
        return d

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        return Polynomial(self.nvars, add_terms(self._terms, other._terms))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        return Polynomial(self.nvars, add_terms(self._terms, other._terms, -1))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._check_same(other)
            return Polynomial(self.nvars, mul_terms(self._terms, other._terms))
        c = Fraction(other)
        return Polynomial(self.nvars, {m: c * v for m, v in self._terms.items()})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check_same(other)
            return other
        return Polynomial.constant(self.nvars, other)

    def _check_same(self, other: "Polynomial"):
        if other.nvars != self.nvars:
            raise DimensionMismatch(f"{self.nvars} vs {other.nvars} variables")

    def to_string(self, names: Optional[Sequence[str]] = None) -> str:
        names = list(names) if names is not None else [f"x{i}" for i in range(self.nvars)]
        if not self._terms:
            return "0"
        pieces = []
        for alpha in sorted(self._terms, key=grlex_key, reverse=True):
            c = self._terms[alpha]
            mono = "*".join(
                names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(alpha) if e
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.to_string()!r})"


# ------------------------------------------------------------ homogenization

def dehomogenize(F: Polynomial) -> Polynomial:
    """f(x_1..x_n) = F(1, x_1..x_n)."""
    F.require_homogeneous()
    if F.nvars == 0:
        raise DimensionMismatch("need at least one variable")
    return Polynomial(F.nvars - 1, {m[1:]: c for m, c in F.items()})


def homogenize(f: Polynomial, d: int) -> Polynomial:
    """Inverse of :func:`dehomogenize` at degree d (new variable in front)."""
    if not f.is_zero() and f.degree > d:
        raise DegreeExceeded(f"degree {f.degree} > {d}")
    return Polynomial(f.nvars + 1, {(d - sum(m),) + m: c for m, c in f.items()})


# --------------------------------------------------------------- apolarity

def _check_degree(f: Polynomial, d: int):
    if not f.is_zero() and f.degree > d:
        raise DegreeExceeded(f"polynomial of degree {f.degree} in R_<={d}")


def apolar_product(f: Polynomial, g: Polynomial, d: int) -> Fraction:
    """<f, g> = sum_alpha f_alpha g_alpha / C(d, alpha) on R_<=d."""
    _check_degree(f, d)
    _check_degree(g, d)
    if f.nvars != g.nvars:
        raise DimensionMismatch("different number of variables")
    small, big = (f, g) if len(f._terms) <= len(g._terms) else (g, f)
    total = Fraction(0)
    for alpha, c in small.items():
        other = big._terms.get(alpha)
        if other is not None:
            total += c * other / multinomial(d, alpha)
    return total


def dual_eval(f: Polynomial, d: int, alpha: MultiIndex) -> Fraction:
    """f*(x^alpha) = f_alpha / C(d, alpha)."""
    alpha = tuple(alpha)
    if sum(alpha) > d:
        raise DegreeExceeded(f"|alpha| = {sum(alpha)} > d = {d}")
    return f.coeff(alpha) / multinomial(d, alpha)


def eval_at_point(f: Polynomial, point: Sequence):
    if len(point) != f.nvars:
        raise DimensionMismatch(f"point of dimension {len(point)} for {f.nvars} variables")
    total = 0
    for alpha, c in f.items():
        term = c
        for z, e in zip(point, alpha):
            if e:
                term = term * z ** e
        total = total + term
    return total


# ------------------------------------------------------- changes of variables

@dataclass(frozen=True)
class LinearChange:
    """Invertible square rational matrix T acting by F -> F(T y)."""

    matrix: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.matrix)
        if any(len(r) != len(rows) for r in rows):
            raise DimensionMismatch("change of variables must be square")
        if qlinalg.det(rows) == 0:
            raise NotInvertible("singular change of variables")
        object.__setattr__(self, "matrix", rows)

    @property
    def size(self) -> int:
        return len(self.matrix)

    def inverse(self) -> "LinearChange":
        return LinearChange(tuple(map(tuple, qlinalg.inverse(self.matrix))))

    @classmethod
    def identity(cls, n: int) -> "LinearChange":
        return cls(tuple(map(tuple, qlinalg.identity(n))))


def apply_change(F: Polynomial, T: LinearChange) -> Polynomial:
    """F(T y), expanded and recollected."""
    if T.size != F.nvars:
        raise DimensionMismatch(f"{T.size}x{T.size} change for {F.nvars} variables")
    return Polynomial(F.nvars, substitute_terms(F._terms, T.matrix, F.nvars))


def substitute_linear(F: Polynomial, rows: Sequence[Sequence]) -> Polynomial:
    """F with x_i replaced by the linear form rows[i] (rows may be non-square)."""
    if len(rows) != F.nvars:
        raise DimensionMismatch("one row per variable required")
    new_n = len(rows[0]) if rows else 0
    return Polynomial(new_n, substitute_terms(F._terms, rows, new_n))


# ------------------------------------------------------------- derivatives

def partial_derivative(F: Polynomial, i: int) -> Polynomial:
    if not 0 <= i < F.nvars:
        raise IndexError(f"variable index {i} out of range")
    out = {}
    for m, c in F.items():
        if m[i]:
            out[m[:i] + (m[i] - 1,) + m[i + 1:]] = c * m[i]
    return Polynomial(F.nvars, out)


def power_of_linear_form(coeffs: Sequence, d: int) -> Polynomial:
    if d < 0:
        raise ValueError("negative power")
    return Polynomial(len(coeffs), power_terms([Fraction(c) for c in coeffs], d))


def sum_polys(polys: Iterable[Polynomial], nvars: int) -> Polynomial:
    return reduce(lambda a, b: a + b, polys, Polynomial(nvars))
