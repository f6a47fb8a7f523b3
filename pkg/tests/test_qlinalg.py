from fractions import Fraction

import sympy as sp
from hypothesis import given, settings, strategies as st

from hankeldecomp import qlinalg

entries = st.integers(-4, 4).map(Fraction)


@st.composite
def matrices(draw, square=False):
    r = draw(st.integers(1, 4))
    c = r if square else draw(st.integers(1, 4))
    return [draw(st.lists(entries, min_size=c, max_size=c)) for _ in range(r)]


def _sym(a):
    return sp.Matrix([[sp.Rational(v.numerator, v.denominator) for v in row] for row in a])


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_and_nullspace(a):
    assert qlinalg.rank(a) == _sym(a).rank()
    K = qlinalg.nullspace(a)
    assert len(K) == len(a[0]) - qlinalg.rank(a)
    for v in K:
        assert all(sum(r * x for r, x in zip(row, v)) == 0 for row in a)


@settings(max_examples=60, deadline=None)
@given(matrices(square=True))
def test_det_inverse_solve(a):
    S = _sym(a)
    assert qlinalg.det(a) == Fraction(str(S.det()))
    inv = qlinalg.inverse(a)
    if S.det() == 0:
        assert inv is None
        return
    assert qlinalg.matmul(a, inv) == qlinalg.identity(len(a))
    b = [Fraction(i + 1) for i in range(len(a))]
    sol = qlinalg.solve(a, b)
    assert [sum(r * x for r, x in zip(row, sol)) for row in a] == b


def test_solve_inconsistent():
    assert qlinalg.solve([[Fraction(1), Fraction(1)], [Fraction(2), Fraction(2)]], [Fraction(1), Fraction(3)]) is None
