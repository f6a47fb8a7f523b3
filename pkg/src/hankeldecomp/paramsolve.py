"""Filling the unknown moments so that the multiplication operators commute.

For a basis B the operators are M_k = H_k H^{-1}, with H = (Lambda(b_i b_j))
and H_k = (Lambda(x_k b_i b_j)).  We need det H != 0 and [M_k, M_l] = 0.

Strategy, cheapest first:
  0. no unknowns at all: check exactly;
  1. draw the unknowns inside H as small integers until det H != 0;
  2. if the commutators are affine in the remaining unknowns, solve exactly;
  3. otherwise Levenberg-Marquardt over C on every unknown, random restarts;
  4. re-draw step 1 and repeat a few times.
Failure is returned as a value, never raised.
"""

from __future__ import annotations

import math
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import qlinalg
from .config import Config
from .errors import SingularBlock
from .moments import HankelBlock, MomentTable, ParamAssignment, Slot, hankel_block

log = logging.getLogger(__name__)


@dataclass
class CommutationProblem:
    table: MomentTable
    basis: Tuple[Tuple[int, ...], ...]
    block: HankelBlock
    shifted: List[HankelBlock]
    det_slots: List[Slot]
    shift_slots: List[Slot]

    @property
    def free_slots(self) -> List[Slot]:
        return self.det_slots + self.shift_slots

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def nvars(self) -> int:
        return self.table.nvars


def build_problem(table: MomentTable, basis: Sequence[Sequence[int]]) -> CommutationProblem:
    basis = tuple(tuple(b) for b in basis)
    H = hankel_block(table, basis)
    shifted = [hankel_block(table, basis, shift=k) for k in range(table.nvars)]
    det_slots = H.slots
    in_h = set(det_slots)
    rest = sorted({s for blk in shifted for s in blk.slots} - in_h)
    return CommutationProblem(table, basis, H, shifted, det_slots, rest)


@dataclass
class SolveOutcome:
    solved: bool
    assignment: Optional[ParamAssignment] = None
    exact: bool = False
    operators: Optional[list] = None     # M_k, exact nested lists or numpy arrays
    stage: Optional[str] = None
    attempts: int = 0
    best_residual: float = float("inf")
    message: str = ""


# ------------------------------------------------------------------ exact side

def _exact_operators(problem: CommutationProblem, assignment: ParamAssignment):
    H = problem.block.numeric(assignment)
    X = qlinalg.inverse(H)
    if X is None:
        raise SingularBlock("H^B is singular under this assignment")
    return [qlinalg.matmul(blk.numeric(assignment), X) for blk in problem.shifted]


def _numeric_operators(problem: CommutationProblem, assignment: ParamAssignment, cond_cap=1e12):
    H = np.array(problem.block.numeric(assignment), dtype=complex)
    if not np.all(np.isfinite(H)) or np.linalg.cond(H) > cond_cap:
        raise SingularBlock("H^B is numerically singular under this assignment")
    X = np.linalg.inv(H)
    return [np.array(blk.numeric(assignment), dtype=complex) @ X for blk in problem.shifted]


def _exact_commutators(Ms):
    out = {}
    for k, l in combinations(range(len(Ms)), 2):
        a = qlinalg.matmul(Ms[k], Ms[l])
        b = qlinalg.matmul(Ms[l], Ms[k])
        out[(k, l)] = [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]
    return out


def commutator_residual(problem: CommutationProblem, assignment: Optional[ParamAssignment] = None):
    """Max-abs commutator entry and the per-pair commutator matrices.

    Exact (Fraction) when every value in play is rational, float otherwise.
    Raises SingularBlock when H^B is singular.
    """
    assignment = assignment or ParamAssignment()
    if assignment.is_exact:
        Ms = _exact_operators(problem, assignment)
        pairs = _exact_commutators(Ms)
        value = max((abs(x) for C in pairs.values() for row in C for x in row), default=Fraction(0))
        return value, pairs
    Ms = _numeric_operators(problem, assignment, cond_cap=1e16)
    pairs = {(k, l): Ms[k] @ Ms[l] - Ms[l] @ Ms[k] for k, l in combinations(range(len(Ms)), 2)}
    value = max((float(np.max(np.abs(C))) for C in pairs.values()), default=0.0)
    return value, pairs


def _exact_check(problem, assignment) -> Optional[list]:
    """Exact operators when det != 0 and they commute, else None."""
    try:
        Ms = _exact_operators(problem, assignment)
    except SingularBlock:
        return None
    for C in _exact_commutators(Ms).values():
        if any(x for row in C for x in row):
            return None
    return Ms


# --------------------------------------------------------------- stage helpers

def _moment_scale(table: MomentTable) -> Tuple[float, float]:
    """(|Lambda(1)|, typical growth per degree) from the known moments."""
    d, n = table.degree, table.nvars
    from .polyring import monomials_of_degree

    m0 = abs(float(table.value((0,) * n))) or 1.0
    top = max((abs(float(table.value(a))) for a in monomials_of_degree(n, d)), default=0.0)
    growth = (top / m0) ** (1.0 / d) if top > 0 else 1.0
    return m0, min(max(growth, 1e-3), 1e3)


def _slot_scale(slot: Slot, scale) -> float:
    m0, g = scale
    return m0 * g ** sum(slot.alpha)


def _random_rational(rng, slot, scale, bound) -> Fraction:
    k = int(rng.integers(-bound, bound + 1))
    # nearest power of two keeps the draw exact and short
    raw = _slot_scale(slot, scale)
    s = Fraction(2) ** round(math.log2(raw)) if raw > 0 else Fraction(1)
    return k * s


def _affine_stage(problem, assignment, rng, bound, scale):
    """Solve the commutators exactly if they are affine in the shift-only slots.

    Returns (status, assignment) with status in {"solved", "inconsistent",
    "nonlinear", "singular"}.
    """
    H = problem.block.numeric(assignment)
    X = qlinalg.inverse(H)
    if X is None:
        return "singular", None
    slots = problem.shift_slots
    parts = [blk.affine_parts(slots, assignment) for blk in problem.shifted]
    base_M = [qlinalg.matmul(A0, X) for A0, _ in parts]
    # M_k restricted to the pattern of slot s: rows of X summed into place
    r = len(H)

    def pattern_times_X(pattern):
        out = [[Fraction(0)] * r for _ in range(r)]
        for i, j in pattern:
            out[i] = [a + b for a, b in zip(out[i], X[j])]
        return out

    slot_M = [[pattern_times_X(p) for p in pats] for _, pats in parts]

    def comm_at(values: Dict[int, Fraction]):
        Ms = []
        for k in range(problem.nvars):
            M = [row[:] for row in base_M[k]]
            for s, v in values.items():
                if v:
                    M = [[a + v * b for a, b in zip(ra, rb)] for ra, rb in zip(M, slot_M[k][s])]
            Ms.append(M)
        C = _exact_commutators(Ms)
        return [x for key in sorted(C) for row in C[key] for x in row]

    c0 = comm_at({})
    if not slots:
        return ("solved" if not any(c0) else "inconsistent"), assignment
    # probe for quadratic terms: C(a+b) - C(a) - C(b) + C(0) vanishes iff affine
    for _ in range(2):
        a = {s: Fraction(int(rng.integers(-5, 6))) for s in range(len(slots))}
        b = {s: Fraction(int(rng.integers(-5, 6))) for s in range(len(slots))}
        ab = {s: a[s] + b[s] for s in a}
        ca, cb, cab = comm_at(a), comm_at(b), comm_at(ab)
        if any(x - y - z + w for x, y, z, w in zip(cab, ca, cb, c0)):
            return "nonlinear", None
    cols = []
    for s in range(len(slots)):
        cs = comm_at({s: Fraction(1)})
        cols.append([x - y for x, y in zip(cs, c0)])
    A = qlinalg.transpose(cols) if c0 else []
    if not c0:
        sol = ([Fraction(0)] * len(slots), qlinalg.identity(len(slots)))
    else:
        sol = qlinalg.solve_affine(A, [-x for x in c0])
    if sol is None:
        return "inconsistent", None
    x0, kernel = sol
    x = list(x0)
    for vec in kernel:
        lead = max(range(len(vec)), key=lambda i: abs(vec[i]))
        t = _random_rational(rng, slots[lead], scale, bound) / vec[lead]
        x = [xi + t * vi for xi, vi in zip(x, vec)]
    return "solved", assignment.with_values({s: v for s, v in zip(slots, x)})


class _NumericSystem:
    """Residual and Jacobian of all pairwise commutators in the free slots."""

    def __init__(self, problem: CommutationProblem, fixed: ParamAssignment, slots: List[Slot]):
        self.slots = slots
        p = len(slots)
        A0, pats = problem.block.affine_parts(slots, fixed)
        r = len(A0)
        self.r = r
        self.H0 = np.array(A0, dtype=complex)
        self.PH = np.zeros((p, r, r), dtype=complex)
        for s, pat in enumerate(pats):
            for i, j in pat:
                self.PH[s, i, j] = 1
        self.K0, self.PK = [], []
        for blk in problem.shifted:
            B0, bpats = blk.affine_parts(slots, fixed)
            self.K0.append(np.array(B0, dtype=complex))
            P = np.zeros((p, r, r), dtype=complex)
            for s, pat in enumerate(bpats):
                for i, j in pat:
                    P[s, i, j] = 1
            self.PK.append(P)
        self.n = len(problem.shifted)
        self.pairs = list(combinations(range(self.n), 2))

    def matrices(self, z):
        H = self.H0 + np.tensordot(z, self.PH, axes=1)
        Hk = [K0 + np.tensordot(z, P, axes=1) for K0, P in zip(self.K0, self.PK)]
        return H, Hk

    def evaluate(self, z, jacobian=True):
        H, Hk = self.matrices(z)
        X = np.linalg.inv(H)
        Ms = [K @ X for K in Hk]
        R = np.concatenate([(Ms[k] @ Ms[l] - Ms[l] @ Ms[k]).ravel() for k, l in self.pairs]) if self.pairs else np.zeros(0, complex)
        scale = max(1.0, max(np.linalg.norm(M, 2) for M in Ms) ** 2)
        if not jacobian:
            return R, scale, H, Ms
        p = len(self.slots)
        dX = -np.einsum("ij,sjk,kl->sil", X, self.PH, X)
        dM = [np.einsum("sij,jk->sik", self.PK[k], X) + np.einsum("ij,sjk->sik", Hk[k], dX) for k in range(self.n)]
        blocks = []
        for k, l in self.pairs:
            dR = (
                np.einsum("sij,jk->sik", dM[k], Ms[l])
                + np.einsum("ij,sjk->sik", Ms[k], dM[l])
                - np.einsum("sij,jk->sik", dM[l], Ms[k])
                - np.einsum("ij,sjk->sik", Ms[l], dM[k])
            )
            blocks.append(dR.reshape(p, -1).T)
        J = np.vstack(blocks) if blocks else np.zeros((0, p), complex)
        return R, scale, H, Ms, J


def _levenberg_marquardt(system: _NumericSystem, z0, config: Config):
    z = np.array(z0, dtype=complex)
    try:
        R, scale, _, _, J = system.evaluate(z)
    except np.linalg.LinAlgError:
        return z, np.inf
    cost = np.linalg.norm(R)
    mu = 1e-3
    for _ in range(config.newton_iterations):
        if cost / scale <= config.commute_tol * 1e-2:
            break
        JhJ = J.conj().T @ J
        g = J.conj().T @ R
        D = np.real(np.diag(JhJ)).copy()
        D[D <= 0] = 1.0
        improved = False
        for _inner in range(12):
            try:
                step = np.linalg.solve(JhJ + mu * np.diag(D), -g)
            except np.linalg.LinAlgError:
                mu *= 10
                continue
            zn = z + step
            try:
                Rn, sn, _, _, Jn = system.evaluate(zn)
            except np.linalg.LinAlgError:
                mu *= 10
                continue
            cn = np.linalg.norm(Rn)
            if np.isfinite(cn) and cn < cost:
                z, R, scale, J, cost = zn, Rn, sn, Jn, cn
                mu = max(mu / 5, 1e-15)
                improved = True
                break
            mu *= 6
        if not improved:
            break
    return z, cost / scale


def _rationalize_values(values, cap):
    out = []
    for v in values:
        v = complex(v)
        if abs(v.imag) > 1e-9 * (1 + abs(v)):
            return None
        q = Fraction(v.real).limit_denominator(cap)
        if abs(float(q) - v.real) > 1e-8 * (1 + abs(v)):
            return None
        out.append(q)
    return out


def solve(problem: CommutationProblem, seed: int = 0, config: Optional[Config] = None) -> SolveOutcome:
    config = config or Config()
    rng = np.random.default_rng(seed)
    base = ParamAssignment()
    attempts = 0

    if not problem.free_slots:
        attempts = 1
        Ms = _exact_check(problem, base)
        if Ms is not None:
            return SolveOutcome(True, base, True, Ms, "exact", attempts, 0.0)
        try:
            value, _ = commutator_residual(problem, base)
            msg = "operators do not commute"
        except SingularBlock:
            value, msg = float("inf"), "H^B singular"
        return SolveOutcome(False, None, stage="exact", attempts=attempts, best_residual=float(value), message=msg)

    scale = _moment_scale(problem.table)
    best = float("inf")
    for outer in range(config.outer_restarts):
        # stage 1
        det_assign = None
        for _ in range(config.det_retries):
            attempts += 1
            vals = {s: _random_rational(rng, s, scale, config.slot_bound) for s in problem.det_slots}
            cand = base.with_values(vals)
            if qlinalg.det(problem.block.numeric(cand)) != 0:
                det_assign = cand
                break
        if det_assign is None and not problem.det_slots:
            return SolveOutcome(False, None, stage="det", attempts=attempts, message="H^B singular, nothing to vary")
        # stage 2
        if det_assign is not None:
            status, assign = _affine_stage(problem, det_assign, rng, config.slot_bound, scale)
            if status == "solved":
                Ms = _exact_check(problem, assign)
                if Ms is not None:
                    return SolveOutcome(True, assign, True, Ms, "affine", attempts, 0.0)
        # stage 3
        slots = problem.free_slots
        system = _NumericSystem(problem, base, slots)
        scales = np.array([_slot_scale(s, scale) for s in slots])
        for restart in range(config.newton_restarts):
            attempts += 1
            z0 = rng.standard_normal(len(slots)) * scales
            if restart % 2 == 1:
                z0 = z0 + 1j * rng.standard_normal(len(slots)) * scales
            if restart == 0 and det_assign is not None:
                for i, s in enumerate(problem.det_slots):
                    z0[i] = float(det_assign.get(s))
            z, res = _levenberg_marquardt(system, z0, config)
            best = min(best, res)
            if not res <= config.commute_tol:
                continue
            H, _ = system.matrices(z)
            if np.linalg.cond(H) > config.cond_cap:
                continue
            q = _rationalize_values(z, config.denominator_cap)
            if q is not None:
                assign = base.with_values(dict(zip(slots, q)))
                Ms = _exact_check(problem, assign)
                if Ms is not None:
                    return SolveOutcome(True, assign, True, Ms, "newton", attempts, 0.0)
            assign = base.with_values({s: complex(v) for s, v in zip(slots, z)})
            _, _, _, Ms = system.evaluate(z, jacobian=False)
            return SolveOutcome(True, assign, False, Ms, "newton", attempts, float(res))
    return SolveOutcome(False, None, stage="newton", attempts=attempts, best_residual=best,
                        message="no commuting fill found")


def verify_outcome(problem: CommutationProblem, outcome: SolveOutcome, config: Optional[Config] = None) -> bool:
    """Independent recheck of a Solved outcome from its assignment alone."""
    config = config or Config()
    if not outcome.solved:
        return False
    try:
        value, _ = commutator_residual(problem, outcome.assignment)
    except SingularBlock:
        return False
    if outcome.exact:
        return value == 0
    Ms = _numeric_operators(problem, outcome.assignment, cond_cap=config.cond_cap)
    scale = max(1.0, max(np.linalg.norm(M, 2) for M in Ms) ** 2)
    return float(value) / scale <= config.commute_tol * 10
