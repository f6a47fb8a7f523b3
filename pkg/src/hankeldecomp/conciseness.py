"""Essential variables via the first catalecticant.

The rank of the matrix of first partials is the number of linear forms a
polynomial genuinely depends on; its row space, read as linear forms, spans
the essential variables.  ``reduce_to_essential`` rewrites F in exactly that
many variables and keeps the change of coordinates for the pull-back.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from . import qlinalg
from .errors import ZeroPolynomial
from .polyring import (
    LinearChange,
    Polynomial,
    monomials_of_degree,
    partial_derivative,
    substitute_linear,
)


@dataclass(frozen=True)
class Catalecticant:
    """Row i holds the coefficients of dF/dx_i over the degree d-1 monomials."""

    columns: Tuple[Tuple[int, ...], ...]
    rows: Tuple[Tuple[Fraction, ...], ...]

    @property
    def rank(self) -> int:
        return qlinalg.rank([list(r) for r in self.rows])


def catalecticant(F: Polynomial) -> Catalecticant:
    if F.is_zero():
        raise ZeroPolynomial("catalecticant of the zero polynomial")
    d = F.require_homogeneous()
    if d < 1:
        raise ValueError("degree must be at least 1")
    cols = monomials_of_degree(F.nvars, d - 1)
    rows = []
    for i in range(F.nvars):
        D = partial_derivative(F, i)
        rows.append(tuple(D.coeff(m) for m in cols))
    return Catalecticant(tuple(cols), tuple(rows))


def essential_count(F: Polynomial) -> int:
    return catalecticant(F).rank


def essential_forms(F: Polynomial) -> List[List[Fraction]]:
    """A basis of the span of the essential linear forms (as coefficient rows).

    If v is in the left kernel of the catalecticant, F is constant along v, so
    the essential forms are the annihilator of that kernel, i.e. the column
    space of the catalecticant.
    """
    cat = catalecticant(F)
    cols = qlinalg.transpose([list(r) for r in cat.rows])
    red, _ = qlinalg.rref(cols)
    return [row for row in red if any(row)]


@dataclass(frozen=True)
class Reduction:
    """F rewritten as G(y_0..y_{m-1}) with y = S x (first m rows of S)."""

    poly: Polynomial
    change: LinearChange        # full square S, x -> y
    essential_rows: Tuple[Tuple[Fraction, ...], ...]
    seed: int
    mixed: bool

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def pullback_form(self, coeffs: Sequence) -> list:
        """Linear form a.y in reduced variables -> coefficient vector in x."""
        rows = self.change.matrix[: self.nvars]
        n = len(rows[0])
        return [sum((coeffs[j] * rows[j][i] for j in range(self.nvars)), 0) for i in range(n)]

    def pullback_rows(self):
        return [list(r) for r in self.change.matrix[: self.nvars]]


def _complete_basis(rows: List[List[Fraction]], n: int) -> List[List[Fraction]]:
    out = [list(r) for r in rows]
    for i in range(n):
        if len(out) == n:
            break
        e = [Fraction(int(j == i)) for j in range(n)]
        if qlinalg.rank(out + [e]) > len(out):
            out.append(e)
    return out


def reduce_to_essential(F: Polynomial, seed: int = 0, bound: int = 20, mix: bool = True) -> Reduction:
    """Change coordinates so that F depends on the first N_ess variables only.

    With ``mix`` the essential basis is scrambled by a random integer matrix
    with entries in [-bound, bound]; this is what makes the coordinates
    general.  ``mix=False`` keeps the coordinates untouched when F is already
    concise, and otherwise uses the reduced echelon basis.
    """
    if F.is_zero():
        raise ZeroPolynomial("cannot reduce the zero polynomial")
    F.require_homogeneous()
    n = F.nvars
    E = essential_forms(F)
    m = len(E)
    if not mix and m == n:
        S = qlinalg.identity(n)
        top = S
    else:
        if mix:
            rng = random.Random(seed)
            while True:
                R = [[Fraction(rng.randint(-bound, bound)) for _ in range(m)] for _ in range(m)]
                if qlinalg.det(R) != 0:
                    break
            top = qlinalg.matmul(R, E)
        else:
            top = E
        S = _complete_basis(top, n)
    change = LinearChange(tuple(map(tuple, S)))
    # G(y) = F(S^{-1} y); only the first m variables survive.
    Sinv = qlinalg.inverse(S)
    G_full = substitute_linear(F, Sinv)
    G = Polynomial(m, {a[:m]: c for a, c in G_full.items()})
    assert all(not any(a[m:]) for a, _ in G_full.items())
    return Reduction(G, change, tuple(map(tuple, top[:m])), seed, mix)


def hessian_determinant(F: Polynomial):
    """Symbolic Hessian determinant (sympy expression); used for sanity checks."""
    import sympy

    xs = sympy.symbols(f"x0:{F.nvars}")
    expr = sum(
        sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[x ** e for x, e in zip(xs, a)])
        for a, c in F.items()
    )
    return sympy.expand(sympy.hessian(expr, xs).det())
