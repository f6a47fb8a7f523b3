import random
from fractions import Fraction

import numpy as np
import pytest

from fixtures import CUBIC_THREE_CUBES, TANGENT_CUBIC, TANGENT_QUINTIC
from hankeldecomp.config import Config
from hankeldecomp.moments import ParamAssignment, build_moment_table
from hankeldecomp.paramsolve import build_problem, commutator_residual, solve, verify_outcome
from hankeldecomp.polyring import Polynomial, dehomogenize, power_of_linear_form
from hankeldecomp.spectral import OperatorFamily, analyze

ONE_Y_Z = [(0, 0), (1, 0), (0, 1)]


def problem(F, basis):
    return build_problem(build_moment_table(dehomogenize(F), F.degree), basis)


def test_known_blocks_commute():
    pb = problem(CUBIC_THREE_CUBES, ONE_Y_Z)
    out = solve(pb)
    assert out.solved and out.exact and not pb.free_slots
    assert out.operators[0] == [[0, 1, 0], [0, 1, 0], [-1, 1, 1]]
    assert out.operators[1] == [[0, 0, 1], [-1, 1, 1], [0, 0, 1]]


def test_quintic_operators():
    pb = problem(TANGENT_QUINTIC, [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1)])
    out = solve(pb)
    F9 = Fraction
    assert out.exact
    assert out.operators[0] == [[0, 1, 0, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1], [-2, 3, 0, 0, 0], [3, -6, -1, 3, 2]]
    assert out.operators[1] == [
        [0, 0, 1, 0, 0],
        [0, 0, 0, 0, 1],
        [F9(20, 9), F9(-31, 9), -1, F9(20, 9), 1],
        [3, -6, -1, 3, 2],
        [F9(-13, 9), F9(26, 9), -1, F9(-4, 9), 1],
    ]


def test_no_commuting_fill_without_slots():
    pb = problem(TANGENT_CUBIC, ONE_Y_Z)
    assert pb.free_slots == []
    out = solve(pb)
    assert not out.solved
    value, pairs = commutator_residual(pb)
    assert value == Fraction(8, 3)


def test_commuting_fill_with_slots():
    basis = ONE_Y_Z + [(2, 0)]
    pb = problem(TANGENT_CUBIC, basis)
    names = {s.name: s for s in pb.free_slots}
    assert set(names) == {"h_{4,0}", "h_{3,1}", "h_{2,2}", "h_{5,0}", "h_{4,1}"}
    # this fill keeps H^B invertible but the operators do not commute
    near = ParamAssignment({names["h_{4,0}"]: 0, names["h_{3,1}"]: 0, names["h_{2,2}"]: -1,
                            names["h_{5,0}"]: 0, names["h_{4,1}"]: 0})
    assert commutator_residual(pb, near)[0] == 3
    out = solve(pb, seed=0)
    assert out.solved and verify_outcome(pb, out)
    value, _ = commutator_residual(pb, out.assignment)
    assert float(abs(value)) < 1e-8


def test_solved_outcomes_reverify_on_planted_points():
    rng = random.Random(4)
    for trial in range(5):
        pts = set()
        while len(pts) < 4:
            pts.add((rng.randint(-3, 3), rng.randint(-3, 3)))
        F = sum((power_of_linear_form([1, a, b], 5) for a, b in pts), Polynomial(3))
        pb = problem(F, [(0, 0), (1, 0), (0, 1), (2, 0)])
        out = solve(pb, seed=trial, config=Config())
        if not out.solved:
            continue
        assert verify_outcome(pb, out)
        fam = OperatorFamily.from_exact(out.operators, pb.basis) if out.exact else \
            OperatorFamily.from_numeric(out.operators, pb.basis)
        data = analyze(fam)
        if all(m == 1 for m in data.multiplicities):
            found = sorted((round(p[0].real), round(p[1].real)) for p in data.points)
            assert found == sorted(pts)


def test_numeric_operators_commute():
    pb = problem(TANGENT_CUBIC, ONE_Y_Z + [(2, 0)])
    out = solve(pb, seed=1)
    assert out.solved
    Ms = [np.asarray(M, dtype=complex) for M in out.operators]
    assert np.max(np.abs(Ms[0] @ Ms[1] - Ms[1] @ Ms[0])) < 1e-8


@pytest.mark.parametrize("seed", [0, 1])
def test_solve_is_deterministic(seed):
    pb = problem(TANGENT_CUBIC, ONE_Y_Z + [(2, 0)])
    a, b = solve(pb, seed=seed), solve(pb, seed=seed)
    assert a.solved == b.solved
    assert a.assignment.named() == b.assignment.named()
