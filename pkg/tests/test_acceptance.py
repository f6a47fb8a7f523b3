"""Acceptance criteria 1-8, one test each.

Run with ``pytest tests/test_acceptance.py`` (the PASS/FAIL lines appear in
the terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import json
import random
from fractions import Fraction

import pytest
import sympy as sp

from acceptance_log import criterion
from fixtures import BINARY_QUARTIC, HESSIAN_ZERO_CUBIC, NAMED, TANGENT_QUINTIC, TWO_ESSENTIAL
from generators import binary_form, forms_match, planted, sandwich_fixture
from hankeldecomp import Config, cactus, tangential, verify, waring
from hankeldecomp.cli import main as cli_main, report_from_json
from hankeldecomp.conciseness import essential_count, hessian_determinant
from hankeldecomp.moments import build_moment_table, square_block_rank
from hankeldecomp.parsing import parse_polynomial
from hankeldecomp.polyring import (
    Polynomial,
    apolar_product,
    dehomogenize,
    eval_at_point,
    monomials_up_to,
    power_of_linear_form,
)
from hankeldecomp.staircases import count_connected_to_one, enumerate_staircases
from oracles import sylvester_rank

TOL = 1e-8


def _verified(rep, F):
    assert rep.solved, rep.warnings
    res = verify(rep, F)
    if rep.exact:
        assert res == 0
    else:
        assert res <= TOL
    return rep


def _projective(forms):
    return {tuple(Fraction(c) / next(v for v in L if v) for c in L) for L in forms}


def test_criterion_1_staircase_counts():
    with criterion(1, "staircase counts (1,3,5,9,13) and connected-to-1 counts (5,13,35,96,267)"):
        assert [len(list(enumerate_staircases(2, s))) for s in range(3, 8)] == [1, 3, 5, 9, 13]
        assert [count_connected_to_one(2, s) for s in range(3, 8)] == [5, 13, 35, 96, 267]


def test_criterion_2_waring_fixtures():
    with criterion(2, "Waring fixtures: three cubes, binary quartic, two essential variables"):
        F = NAMED["cubic_three_cubes"]
        rep = _verified(waring(F), F)
        assert rep.rank == 3 and rep.exact and verify(rep, F) == 0
        assert _projective(rep.forms) == {(1, 1, 0), (1, 0, 1), (1, 1, 1)}

        rep = _verified(waring(BINARY_QUARTIC, Config(start_rank=2)), BINARY_QUARTIC)
        assert rep.rank == 3
        at_two = [a for a in rep.attempts if a["r"] == 2]
        assert at_two and all(a["result"] == "final linear system has no solution" for a in at_two)
        assert _verified(waring(BINARY_QUARTIC), BINARY_QUARTIC).rank == 3

        rep = _verified(waring(TWO_ESSENTIAL), TWO_ESSENTIAL)
        assert rep.rank == 2 and rep.essential == 2


def test_criterion_3_lower_bounds():
    with criterion(3, "square block rank 3 for the binary quartic and 5 for the tangent quintic"):
        assert square_block_rank(build_moment_table(dehomogenize(BINARY_QUARTIC), 4)) == 3
        assert square_block_rank(build_moment_table(dehomogenize(TANGENT_QUINTIC), 5)) == 5


def test_criterion_4_tangential_fixtures():
    with criterion(4, "tangential ranks 5, 6 and 4 (rank 3 provably failing first)"):
        F = NAMED["tangent_quintic"]
        assert _verified(tangential(F), F).rank == 5
        F = NAMED["tangent_septic"]
        assert _verified(tangential(F), F).rank == 6
        F = NAMED["tangent_cubic"]
        rep = _verified(tangential(F), F)
        assert rep.rank == 4
        at_three = [a for a in rep.attempts if a["r"] == 3]
        # {1, y, z} is the only candidate, it has no free slots, and it fails exactly
        assert [tuple(B) for B in enumerate_staircases(2, 3)] == [((0, 0), (1, 0), (0, 1))]
        assert [[tuple(b) for b in a["basis"]] for a in at_three] == [[(0, 0), (1, 0), (0, 1)]]
        assert "operators do not commute" in at_three[0]["result"]


def test_criterion_5_cactus_fixtures():
    with criterion(5, "cactus fixtures: conic times line, sextic, two k-search cases"):
        F = NAMED["conic_times_line"]
        rep = _verified(cactus(F), F)
        assert rep.rank == 3 and rep.multiplicities == [3] and rep.k == [3]
        (pt,) = rep.points
        assert abs(complex(pt[0]) + 0.25) <= TOL and abs(complex(pt[1]) + 1.25) <= TOL

        F = NAMED["cactus_sextic"]
        rep = _verified(cactus(F), F)
        assert rep.rank == 6
        got = sorted((tuple(p), m, e) for p, m, e in zip(rep.points, rep.multiplicities, rep.exponents))
        assert got == [((0, -1), 1, 6), ((0, 1), 2, 5), ((1, -1), 2, 5), ((1, 1), 1, 6)]

        F = NAMED["square_times_conic"]
        rep = _verified(cactus(F), F)
        assert rep.k == [3] and rep.points == [[1, 1]]

        F = NAMED["square_times_lines"]
        rep = _verified(cactus(F, Config(mix=False)), F)
        assert rep.kbar == [2] and rep.k_search == [(2,), (3,)] and rep.k == [3]
        assert rep.points == [[1, 1]]


def test_criterion_6_essential_variables():
    with criterion(6, "essential variables 2 and 5, vanishing Hessian"):
        assert essential_count(TWO_ESSENTIAL) == 2
        assert essential_count(HESSIAN_ZERO_CUBIC) == 5
        assert sp.expand(hessian_determinant(HESSIAN_ZERO_CUBIC)) == 0


def test_criterion_7_property_suites():
    with criterion(7, "apolarity x100, sandwich x20, binary oracle x50, planted round trip x30"):
        rng = random.Random(2024)
        for _ in range(100):
            n, d = rng.randint(1, 3), rng.randint(0, 5)
            f = Polynomial(n, {m: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for m in monomials_up_to(n, d)})
            l = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)]
            ld = dehomogenize(power_of_linear_form([1] + l, d))
            assert apolar_product(f, ld, d) == eval_at_point(f, l)

        rng = random.Random(11)
        for i in range(20):
            F = sandwich_fixture(rng)
            reps = [_verified(driver(F, seed=i), F) for driver in (cactus, tangential, waring)]
            assert reps[0].lower_bound <= reps[0].rank <= reps[1].rank <= reps[2].rank

        rng = random.Random(7)
        for i in range(50):
            F = binary_form(rng)
            d = F.degree
            rep = _verified(waring(F, seed=i), F)
            assert rep.rank == sylvester_rank([F.coeff((d - j, j)) for j in range(d + 1)])

        rng = random.Random(12)
        for i in range(30):
            F, forms, _ = planted(rng)
            rep = _verified(waring(F, seed=i), F)
            assert rep.rank == len(forms) and forms_match(rep.forms, forms, TOL)


def test_criterion_8_honest_failure(capsys):
    with criterion(8, "budget exhaustion exits 2 with a warning; no unverified output"):
        code = cli_main(["--json", "--max-rank", "2", "3*x^4 + 12*x^2*y^2 + 2*y^4"])
        data = json.loads(capsys.readouterr().out)
        assert code == 2 and data["solved"] is False
        assert data["forms"] == [] and data["rank"] is None
        assert any("budget exhausted" in w for w in data["warnings"])

        # an unreachable tolerance must not let a numeric answer through
        code = cli_main(["--json", "--tol", "1e-30", "--max-rank", "4", "3*x^4 + 12*x^2*y^2 + 2*y^4"])
        data = json.loads(capsys.readouterr().out)
        assert code == 2 and data["solved"] is False

        # every decomposition printed re-verifies from its JSON alone
        for mode, text in [("waring", "(x+y)^3 + (x+z)^3 + (x+y+z)^3"), ("waring", "3*x^4 + 12*x^2*y^2 + 2*y^4"),
                           ("tangential", "(x+y)^2*(x+z) + (x-z)^2*(x+y+z)"),
                           ("cactus", "(x^2+y^2+6*x*z-8*z^2)*(4*x-y-5*z)")]:
            code = cli_main(["--json", "--mode", mode, text])
            out = capsys.readouterr().out
            assert code == 0
            rep = report_from_json(json.loads(out))
            res = verify(rep, parse_polynomial(text))
            assert res == 0 if rep.exact else res <= TOL


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
