import numpy as np

from fixtures import CUBIC_THREE_CUBES, TANGENT_QUINTIC
from hankeldecomp.moments import build_moment_table
from hankeldecomp.paramsolve import build_problem, solve
from hankeldecomp.polyring import dehomogenize
from hankeldecomp.spectral import (
    OperatorFamily,
    analyze,
    chain_ranks,
    common_eigenvectors,
    generalized_chains,
    generalized_eigenspaces,
    generalized_rank,
)


def family(F, basis):
    pb = build_problem(build_moment_table(dehomogenize(F), F.degree), basis)
    out = solve(pb)
    assert out.exact
    return OperatorFamily.from_exact(out.operators, pb.basis)


def test_common_eigenvectors_without_simple_spectrum():
    fam = family(CUBIC_THREE_CUBES, [(0, 0), (1, 0), (0, 1)])
    # no operator has a simple spectrum on its own
    for M in fam.matrices:
        assert len(set(np.round(np.linalg.eigvals(M), 8))) < 3
    data = analyze(fam)
    assert data.exact
    vecs = sorted(c.exact_eigenvector for c in data.clusters)
    assert vecs == [(1, 0, 1), (1, 1, 0), (1, 1, 1)]
    assert all(m == 1 for m in data.multiplicities)
    assert len(common_eigenvectors(fam)) == 3


QUINTIC_BASIS = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1)]


def test_quintic_points_and_multiplicities():
    fam = family(TANGENT_QUINTIC, QUINTIC_BASIS)
    data = analyze(fam)
    got = sorted((c.exact_point, c.multiplicity, c.kbar) for c in data.clusters)
    assert got == [((-2, 3), 1, 1), ((1, -1), 2, 2), ((1, 1), 2, 2)]
    spaces = sorted((tuple(int(round(v.real)) for v in p), m) for p, m, _ in generalized_eigenspaces(fam))
    assert spaces == [((-2, 3), 1), ((1, -1), 2), ((1, 1), 2)]


def test_quintic_chain_ranks():
    fam = family(TANGENT_QUINTIC, QUINTIC_BASIS)
    both = chain_ranks(fam, [1, 0, 0, -1, -1], [1, 1])
    assert [r for r, _ in both] == [2, 2]
    # both chains end on a multiple of the evaluation at (1, 1)
    for _, end in both:
        assert np.linalg.matrix_rank(np.vstack([end, np.ones(5)]), tol=1e-9) == 1
    one = chain_ranks(fam, [1, 0, -1, -1, 0], [1, -1])
    assert [r for r, _ in one] == [2, 1]


def test_generalized_chains_pair_double_points():
    fam = family(TANGENT_QUINTIC, QUINTIC_BASIS)
    data = analyze(fam)
    recs = generalized_chains(fam, data)
    assert len(recs) == 2
    by_point = {tuple(int(round(v.real)) for v in data.clusters[r.cluster].point): r for r in recs}
    assert by_point[(1, 1)].ranks == (2, 2)
    assert by_point[(1, -1)].ranks == (2, 1)
    assert np.allclose(by_point[(1, -1)].endpoint, [1, 1, -1, 1, -1])


def test_generalized_rank_of_jordan_block():
    J = np.array([[2, 1, 0], [0, 2, 1], [0, 0, 2]], dtype=float)
    assert generalized_rank(J, [1, 0, 0], 2) == 1
    assert generalized_rank(J, [0, 1, 0], 2) == 2
    assert generalized_rank(J, [0, 0, 1], 2) == 3


def test_numeric_family_matches_exact():
    exact = family(CUBIC_THREE_CUBES, [(0, 0), (1, 0), (0, 1)])
    noisy = OperatorFamily.from_numeric([M + 1e-13 for M in exact.matrices], exact.basis)
    pts = sorted(tuple(np.round(p.real, 6)) for p in analyze(noisy).points)
    assert pts == [(0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
