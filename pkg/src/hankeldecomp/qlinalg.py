"""Exact linear algebra over the rationals (Gaussian elimination on Fractions).

Matrices are plain lists of rows.  Every function copies its input.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

QMatrix = List[List[Fraction]]


def to_fractions(rows: Sequence[Sequence]) -> QMatrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> QMatrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: QMatrix, b: QMatrix) -> QMatrix:
    bt = list(zip(*b))
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out.append([sum((x * col[k] for k, x in nz), Fraction(0)) for col in bt])
    return out


def transpose(a: QMatrix) -> QMatrix:
    return [list(col) for col in zip(*a)]


def rref(rows: Sequence[Sequence[Fraction]]) -> Tuple[QMatrix, List[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return m, []
    nrows, ncols = len(m), len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rref(rows)[1])


def det(a: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [list(map(Fraction, r)) for r in a]
    n = len(m)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            result = -result
        result *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result


def inverse(a: Sequence[Sequence[Fraction]]) -> Optional[QMatrix]:
    """Exact inverse, or None when the matrix is singular."""
    n = len(a)
    aug = [list(map(Fraction, row)) + e for row, e in zip(a, identity(n))]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        return None
    return [row[n:] for row in red]


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """One solution of a x = b (free variables set to zero), or None if inconsistent."""
    if not a:
        return None if any(b) else []
    ncols = len(a[0])
    aug = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(a, b)]
    red, piv = rref(aug)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(piv):
        x[c] = red[i][ncols]
    return x


def solve_affine(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]):
    """Parametrize all solutions of a x = b.

    Returns (particular, kernel_basis) or None when inconsistent; the general
    solution is particular + sum t_i * kernel_basis[i].
    """
    ncols = len(a[0]) if a else 0
    x0 = solve(a, b)
    if x0 is None:
        return None
    return x0, nullspace(a, ncols)


def nullspace(a: Sequence[Sequence[Fraction]], ncols: Optional[int] = None) -> QMatrix:
    if not a:
        return identity(ncols or 0)
    ncols = len(a[0])
    red, piv = rref(a)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -red[i][f]
        basis.append(v)
    return basis
