import copy
from fractions import Fraction
from math import sqrt

import pytest

from fixtures import BINARY_QUARTIC, NAMED, QUARTIC_PSEUDO, X, Y, run, x, z
from hankeldecomp import Config, DecompositionReport, cactus, tangential, verify, waring
from hankeldecomp.decompose import decompose
from hankeldecomp.polyring import Polynomial, power_of_linear_form as P

TOL = 1e-8


def _ok(report, F):
    assert report.solved
    res = verify(report, F)
    if report.exact:
        assert res == 0 and report.residual == 0
    else:
        assert res <= TOL
    return res


def _projective(forms):
    out = set()
    for L in forms:
        lead = next(c for c in L if c != 0)
        out.add(tuple(Fraction(c) / lead for c in L))
    return out


# ---------------------------------------------------------------- waring

def test_three_cubes():
    rep = run("waring", "cubic_three_cubes")
    _ok(rep, NAMED["cubic_three_cubes"])
    assert rep.rank == 3 and rep.exact
    assert _projective(rep.forms) == {(1, 1, 0), (1, 0, 1), (1, 1, 1)}
    assert rep.weights == [1, 1, 1]


def test_binary_quartic_rank_three():
    rep = run("waring", "binary_quartic")
    _ok(rep, BINARY_QUARTIC)
    assert rep.rank == 3 and rep.lower_bound == 3


def test_binary_quartic_rank_two_is_rejected():
    rep = run("waring", "binary_quartic", start_rank=2)
    assert rep.rank == 3
    at_two = [a for a in rep.attempts if a["r"] == 2]
    assert at_two and all("no solution" in a["result"] for a in at_two)


def test_pseudo_solution_does_not_verify():
    # rank-2 power sum matching every moment of the quartic except y^4
    a = sqrt(2 / 3)
    rep = DecompositionReport("waring", True, rank=2, forms=[[1.0, a], [1.0, -a]], weights=[1.5, 1.5], degree=4)
    assert verify(rep, QUARTIC_PSEUDO) < 1e-12
    assert abs(verify(rep, BINARY_QUARTIC, relative=False) - Fraction(2, 3)) < 1e-12


def test_two_essential_variables():
    rep = run("waring", "two_essential")
    _ok(rep, NAMED["two_essential"])
    assert rep.rank == 2 and rep.essential == 2
    assert _projective(rep.forms) == {(1, 0, 0), (1, 1, 1)}


@pytest.mark.parametrize("coeffs,d", [([1, 2, -1], 5), ([0, 1, 3], 3), ([2, 0], 6)])
def test_pure_power_has_rank_one(coeffs, d):
    F = 3 * P(coeffs, d)
    for driver in (waring, tangential, cactus):
        rep = driver(F)
        _ok(rep, F)
        assert rep.rank == 1


def test_perturbed_weight_fails_verify():
    rep = copy.deepcopy(run("waring", "cubic_three_cubes"))
    rep.weights[0] += Fraction(1, 1000)
    assert verify(rep, NAMED["cubic_three_cubes"]) > 0


def test_linear_form_input():
    F = 2 * x - 3 * z
    rep = waring(F)
    _ok(rep, F)
    assert rep.rank == 1


def test_degree_zero_rejected():
    with pytest.raises(ValueError):
        waring(Polynomial.constant(2, 5))


def test_budget_exhaustion_is_honest():
    rep = waring(BINARY_QUARTIC, Config(max_rank=2))
    assert not rep.solved
    assert rep.rank is None and rep.forms == []
    assert rep.warnings


def test_seed_determinism():
    F = NAMED["tangent_cubic"]
    a, b = tangential(F, seed=5), tangential(F, seed=5)
    assert a.rank == b.rank and a.forms == b.forms and a.weights == b.weights


def test_mode_dispatch():
    assert decompose(BINARY_QUARTIC, "waring").rank == 3
    with pytest.raises(ValueError):
        decompose(BINARY_QUARTIC, "border")


# ---------------------------------------------------------------- tangential

def test_tangent_quintic():
    rep = run("tangential", "tangent_quintic")
    _ok(rep, NAMED["tangent_quintic"])
    assert rep.rank == 5 and rep.lower_bound == 5
    # two tangent pieces, each counted twice, plus one power
    assert len(rep.pairs) == 2


def test_tangent_septic():
    rep = run("tangential", "tangent_septic")
    _ok(rep, NAMED["tangent_septic"])
    assert rep.rank == 6


def test_tangent_cubic_needs_four():
    rep = run("tangential", "tangent_cubic")
    _ok(rep, NAMED["tangent_cubic"])
    assert rep.rank == 4
    at_three = [a for a in rep.attempts if a["r"] == 3]
    assert at_three and all("do not commute" in a["result"] for a in at_three)


@pytest.mark.parametrize("d", [3, 4, 6])
def test_single_tangent_piece(d):
    F = X ** (d - 1) * Y
    rep = tangential(F)
    _ok(rep, F)
    assert rep.rank == 2
    assert waring(F).rank == d


def test_tangential_terms_pair_structure():
    rep = run("tangential", "tangent_quintic")
    # every pair contributes a base form and a direction
    assert rep.rank == len(rep.forms) == len(rep.weights)
    bases = {b for b, _ in rep.pairs}
    assert all(e in (4, 5) for e, _, _ in rep.terms())
    assert sum(1 for e, _, _ in rep.terms() if e == 4) == len(rep.pairs) == len(bases)


# ---------------------------------------------------------------- cactus

def test_conic_times_line():
    rep = run("cactus", "conic_times_line")
    _ok(rep, NAMED["conic_times_line"])
    assert rep.rank == 3
    assert rep.multiplicities == [3] and rep.k == [3]
    (pt,) = rep.points
    assert abs(pt[0] + 0.25) < 1e-8 and abs(pt[1] + 1.25) < 1e-8


def test_cactus_sextic():
    rep = run("cactus", "cactus_sextic")
    _ok(rep, NAMED["cactus_sextic"])
    assert rep.rank == 6
    got = sorted((tuple(p), m, e) for p, m, e in zip(rep.points, rep.multiplicities, rep.exponents))
    assert got == [((0, -1), 1, 6), ((0, 1), 2, 5), ((1, -1), 2, 5), ((1, 1), 1, 6)]


def test_square_times_conic():
    rep = run("cactus", "square_times_conic")
    _ok(rep, NAMED["square_times_conic"])
    assert rep.points == [[1, 1]] and rep.k == [3]


def test_square_times_lines_raises_k():
    rep = run("cactus", "square_times_lines", mix=False)
    _ok(rep, NAMED["square_times_lines"])
    assert rep.kbar == [2] and rep.k == [3]
    assert rep.k_search == [(2,), (3,)]
    assert rep.points == [[1, 1]]


@pytest.mark.parametrize("name", [
    "cubic_three_cubes",
    pytest.param("tangent_quintic", marks=pytest.mark.slow),
    "conic_times_line",
    "tangent_cubic",
])
def test_rank_sandwich_on_fixtures(name):
    F = NAMED[name]
    ranks = [driver(F).rank for driver in (cactus, tangential, waring)]
    assert ranks[0] <= ranks[1] <= ranks[2]


def test_exponents_and_k_relation():
    rep = run("cactus", "cactus_sextic")
    assert all(e == rep.degree - k + 1 for e, k in zip(rep.exponents, rep.k))
    assert all(k >= kb for k, kb in zip(rep.k, rep.kbar))
