"""Common eigenvectors and generalized eigenspaces of commuting operators.

One random combination G = sum gamma_k M_k splits the space into its
generalized eigenspaces; every M_k preserves them because it commutes with G.
On each piece we restrict the M_k, read the point as the traces, and inspect
the nilpotent parts for multiplicity, chain length, and the tangent direction.

When the operators are exact rationals the characteristic polynomial of G is
factored exactly, so cluster sizes are exact; rational roots are then handled
entirely over Q.  Everything else goes through a complex Schur form.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import mpmath
import numpy as np
import scipy.linalg
import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from . import qlinalg
from .config import Config
from .errors import DegenerateNormalization, MultiplicityMismatch
from .polyring import unit

log = logging.getLogger(__name__)


@dataclass
class OperatorFamily:
    matrices: List[np.ndarray]
    basis: Tuple[Tuple[int, ...], ...]
    exact: Optional[list] = None

    @classmethod
    def from_exact(cls, Ms, basis):
        Ms = [[[Fraction(x) for x in row] for row in M] for M in Ms]
        num = [np.array([[float(x) for x in row] for row in M], dtype=complex) for M in Ms]
        return cls(num, tuple(map(tuple, basis)), Ms)

    @classmethod
    def from_numeric(cls, Ms, basis):
        return cls([np.asarray(M, dtype=complex) for M in Ms], tuple(map(tuple, basis)), None)

    @property
    def size(self) -> int:
        return self.matrices[0].shape[0] if self.matrices else len(self.basis)

    @property
    def nvars(self) -> int:
        return len(self.matrices)

    def index_of(self, alpha) -> int:
        return self.basis.index(tuple(alpha))

    def max_commutator(self) -> float:
        Ms = self.matrices
        return max((float(np.max(np.abs(Ms[i] @ Ms[j] - Ms[j] @ Ms[i])))
                    for i in range(len(Ms)) for j in range(i + 1, len(Ms))), default=0.0)


@dataclass
class Cluster:
    """One support point together with its local piece of the dual space."""

    point: np.ndarray                  # complex coordinates (zeta_1..zeta_n)
    eigenvector: np.ndarray            # normalized so the entry at monomial 1 is 1
    multiplicity: int
    nilpotency: Tuple[int, ...]        # per variable: chain length of M_j - zeta_j on the piece
    subspace: np.ndarray               # r x e basis of the generalized eigenspace
    exact_point: Optional[Tuple[Fraction, ...]] = None
    exact_eigenvector: Optional[Tuple[Fraction, ...]] = None
    exact_subspace: Optional[list] = None
    tangent: Optional[np.ndarray] = None         # multiplicity 2: vector with 0 at monomial 1
    exact_tangent: Optional[Tuple[Fraction, ...]] = None

    @property
    def kbar(self) -> int:
        return max(self.nilpotency) if self.nilpotency else 1

    @property
    def is_exact(self) -> bool:
        return self.exact_point is not None


@dataclass
class SpectralData:
    clusters: List[Cluster]
    size: int
    gamma: Tuple[int, ...]
    exact: bool

    @property
    def points(self):
        return [c.point for c in self.clusters]

    @property
    def multiplicities(self):
        return [c.multiplicity for c in self.clusters]

    @property
    def kbars(self):
        return [c.kbar for c in self.clusters]


@dataclass
class ChainRecord:
    cluster: int
    vector: np.ndarray
    ranks: Tuple[int, ...]          # per variable, 1 or 2
    endpoint: np.ndarray            # the rank-1 vector the chain ends in


class _Collision(Exception):
    """Two distinct points landed on the same eigenvalue of G."""


# ------------------------------------------------------------------ helpers

def _exact_matpow_is_zero(N, p) -> bool:
    P = N
    for _ in range(p - 1):
        P = qlinalg.matmul(P, N)
    return not any(x for row in P for x in row)


def _exact_index(N) -> int:
    e = len(N)
    P = N
    for p in range(1, e + 1):
        if not any(x for row in P for x in row):
            return p
        P = qlinalg.matmul(P, N)
    return e + 1


def _numeric_index(N, tol) -> int:
    e = N.shape[0]
    scale = max(1.0, np.linalg.norm(N, 2))
    P = N.copy()
    for p in range(1, e + 1):
        if np.linalg.norm(P, 2) <= tol * scale ** p:
            return p
        P = P @ N
    return e + 1


def _charpoly_factors(G):
    dm = DomainMatrix([[QQ.convert(x) for x in row] for row in G], (len(G), len(G)), QQ)
    coeffs = dm.charpoly()
    lam = sympy.Symbol("lam")
    poly = sympy.Poly([sympy.Rational(int(c.numerator), int(c.denominator)) for c in coeffs], lam, domain="QQ")
    _, factors = poly.factor_list()
    return factors


def _rational_root(g: sympy.Poly) -> Optional[Fraction]:
    if g.degree() != 1:
        return None
    a, b = g.all_coeffs()
    root = -sympy.Rational(b) / sympy.Rational(a)
    return Fraction(int(root.p), int(root.q))


def _numeric_roots(g: sympy.Poly) -> List[complex]:
    try:
        return [complex(z) for z in g.nroots(n=30, maxsteps=500)]
    except mpmath.libmp.libhyper.NoConvergence:
        return [complex(z) for z in np.roots([float(c) for c in g.all_coeffs()])]


def _normalize(v, linear, tiny=1e-13):
    """Scale so the coordinate at 1 is 1.

    Only the coordinates at 1 and the variables are compared: for a far
    point the higher monomials legitimately dominate.
    """
    v = np.asarray(v, dtype=complex)
    scale = max([abs(v[0])] + [abs(v[i]) for i in linear])
    if scale == 0 or abs(v[0]) <= tiny * scale:
        raise DegenerateNormalization("eigenvector vanishes at the monomial 1")
    return v / v[0]


# ------------------------------------------------------------ cluster analysis

def _exact_cluster(family: OperatorFamily, G, mu: Fraction, e: int) -> Cluster:
    r = family.size
    N = [[G[i][j] - (mu if i == j else 0) for j in range(r)] for i in range(r)]
    Ne = N
    for _ in range(e - 1):
        Ne = qlinalg.matmul(Ne, N)
    W = qlinalg.nullspace(Ne)
    if len(W) != e:
        raise _Collision("generalized eigenspace has the wrong dimension")
    Q = qlinalg.transpose(W)                      # r x e
    _, piv = qlinalg.rref(W)                      # e independent coordinates
    Qp_inv = qlinalg.inverse([Q[i] for i in piv])
    A = []
    for M in family.exact:
        MQ = qlinalg.matmul(M, Q)
        A.append(qlinalg.matmul(Qp_inv, [MQ[i] for i in piv]))
    point = tuple(sum((Ak[i][i] for i in range(e)), Fraction(0)) / e for Ak in A)
    Ns = [[[Ak[i][j] - (z if i == j else 0) for j in range(e)] for i in range(e)] for Ak, z in zip(A, point)]
    if any(not _exact_matpow_is_zero(Nk, e) for Nk in Ns):
        raise _Collision("restricted operators are not nilpotent")
    stacked = [row for Nk in Ns for row in Nk]
    common = qlinalg.nullspace(stacked) if stacked else qlinalg.identity(e)
    if len(common) != 1:
        raise _Collision(f"{len(common)} common eigenvectors on one piece")
    c = common[0]
    v = [sum((Q[i][j] * c[j] for j in range(e)), Fraction(0)) for i in range(r)]
    if v[0] == 0:
        raise DegenerateNormalization("eigenvector vanishes at the monomial 1")
    v = [x / v[0] for x in v]
    tangent = None
    if e == 2:
        # vector of the piece with zero coordinate at 1
        t = qlinalg.nullspace([Q[0]])[0]
        w = [sum((Q[i][j] * t[j] for j in range(e)), Fraction(0)) for i in range(r)]
        lead = next(x for x in w if x != 0)
        tangent = tuple(x / lead for x in w)
    nil = tuple(_exact_index(Nk) for Nk in Ns)
    return Cluster(
        point=np.array([complex(float(z)) for z in point]),
        eigenvector=np.array([complex(float(x)) for x in v]),
        multiplicity=e,
        nilpotency=nil,
        subspace=np.array([[float(x) for x in row] for row in Q], dtype=complex),
        exact_point=point,
        exact_eigenvector=tuple(v),
        exact_subspace=Q,
        tangent=None if tangent is None else np.array([complex(float(x)) for x in tangent]),
        exact_tangent=tangent,
    )


def _numeric_cluster(family: OperatorFamily, G: np.ndarray, mu: complex, e: int, tol: float) -> Cluster:
    r = family.size
    eig = np.linalg.eigvals(G)
    dist = np.sort(np.abs(eig - mu))
    thr = dist[e - 1] if e == r else 0.5 * (dist[e - 1] + dist[e])
    T, Z, sdim = scipy.linalg.schur(G, output="complex", sort=lambda x: abs(x - mu) <= thr)
    if sdim != e:
        raise _Collision("could not isolate the eigenvalue cluster")
    Q = Z[:, :e]
    A = [Q.conj().T @ M @ Q for M in family.matrices]
    # invariance check: M_k Q must stay inside span(Q)
    for M, Ak in zip(family.matrices, A):
        if np.linalg.norm(M @ Q - Q @ Ak) > tol * max(1.0, np.linalg.norm(M, 2)):
            raise _Collision("piece is not invariant")
    point = np.array([np.trace(Ak) / e for Ak in A])
    Ns = [Ak - z * np.eye(e) for Ak, z in zip(A, point)]
    for Nk, M in zip(Ns, family.matrices):
        scale = max(1.0, np.linalg.norm(M, 2))
        if np.linalg.norm(np.linalg.matrix_power(Nk, e), 2) > tol * scale ** e:
            raise _Collision("restricted operators are not nilpotent")
    stacked = np.vstack(Ns) if Ns else np.zeros((0, e))
    if stacked.shape[0]:
        _, s, Vh = np.linalg.svd(stacked)
        c = Vh[-1].conj()
        ref = max(1.0, max(np.linalg.norm(M, 2) for M in family.matrices))
        if e > 1 and s[-2] <= tol * ref:
            raise _Collision("more than one common eigenvector on one piece")
    else:
        c = np.ones(1, dtype=complex)
    try:
        v = _normalize(Q @ c, [family.index_of(unit(family.nvars, j)) for j in range(family.nvars)])
    except DegenerateNormalization:
        # a far point: its eigenvector is dominated by high monomials, but the
        # eigenvalues still locate it
        if not np.all(np.isfinite(point)):
            raise
        v = np.array([np.prod(point ** np.array(b)) for b in family.basis], dtype=complex)
    tangent = None
    if e == 2:
        t = np.array([Q[0, 1], -Q[0, 0]])
        w = Q @ t
        tangent = w / w[np.argmax(np.abs(w))]
    nil = tuple(_numeric_index(Nk, tol) for Nk in Ns)
    return Cluster(point=point, eigenvector=v, multiplicity=e, nilpotency=nil, subspace=Q, tangent=tangent)


def _numeric_groups(eig: np.ndarray, vecs: np.ndarray, rel: float) -> List[List[int]]:
    """Single-linkage grouping of eigenvalues closer than ``rel`` (relative)."""
    scale = 1.0 + np.max(np.abs(eig))
    parent = list(range(len(eig)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(eig)):
        for j in range(i + 1, len(eig)):
            if abs(eig[i] - eig[j]) <= rel * scale:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(len(eig)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def analyze(family: OperatorFamily, seed: int = 0, config: Optional[Config] = None, tries: int = 6) -> SpectralData:
    """Split the space by one random combination and analyse every piece."""
    config = config or Config()
    rng = np.random.default_rng(seed)
    n, r = family.nvars, family.size
    last = None
    for _ in range(tries):
        gamma = tuple(int(g) for g in rng.integers(1, 10 ** 6 + 1, size=n))
        try:
            clusters = _analyze_once(family, gamma, config)
        except _Collision as exc:
            last = exc
            log.debug("spectral retry: %s", exc)
            continue
        total = sum(c.multiplicity for c in clusters)
        if total != r:
            raise MultiplicityMismatch(f"multiplicities sum to {total}, expected {r}")
        exact = all(c.is_exact for c in clusters)
        return SpectralData(clusters, r, gamma, exact)
    raise MultiplicityMismatch(f"could not separate the support points ({last})")


def _analyze_once(family, gamma, config) -> List[Cluster]:
    n, r = family.nvars, family.size
    if n == 0:
        v = np.zeros(r, dtype=complex)
        v[0] = 1
        return [Cluster(np.zeros(0), v, r, (), np.eye(r, dtype=complex), (), tuple(Fraction(int(i == 0)) for i in range(r)))]
    Gnum = sum(g / 10 ** 6 * M for g, M in zip(gamma, family.matrices))
    clusters = []
    if family.exact is not None:
        G = [[sum((g * M[i][j] for g, M in zip(gamma, family.exact)), Fraction(0)) for j in range(r)] for i in range(r)]
        Gscaled = Gnum
        for g, e in _charpoly_factors(G):
            root = _rational_root(g)
            if root is not None:
                clusters.append(_exact_cluster(family, G, root, e))
            else:
                for z in _numeric_roots(g):
                    clusters.append(_numeric_cluster(family, Gscaled, z / 10 ** 6, e, config.eig_tol))
    else:
        eig, vecs = np.linalg.eig(Gnum)
        for grp in _numeric_groups(eig, vecs, 1e-4):
            mu = np.mean(eig[grp])
            clusters.append(_numeric_cluster(family, Gnum, mu, len(grp), config.eig_tol))
    # distinct clusters must be distinct points
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            a, b = clusters[i].point, clusters[j].point
            if np.max(np.abs(a - b)) <= config.cluster_tol * (1 + np.max(np.abs(a))):
                raise _Collision("two pieces share a point")
    clusters.sort(key=lambda c: tuple((round(z.real, 9), round(z.imag, 9)) for z in c.point))
    return clusters


# ---------------------------------------------------------- spec-level views

def common_eigenvectors(family: OperatorFamily, seed: int = 0, config: Optional[Config] = None):
    """[(point, eigenvector)] for every support point; eigenvectors have 1 at the monomial 1."""
    data = analyze(family, seed, config)
    return [(c.point, c.eigenvector) for c in data.clusters]


def generalized_eigenspaces(family: OperatorFamily, seed: int = 0, config: Optional[Config] = None):
    """[(point, multiplicity, kbar)] per support point."""
    data = analyze(family, seed, config)
    return [(c.point, c.multiplicity, c.kbar) for c in data.clusters]


def chain_ranks(family: OperatorFamily, vector, point, tol: float = 1e-8):
    """Per variable j: (rank of ``vector`` under M_j - zeta_j, last nonzero chain vector)."""
    v = np.asarray(vector, dtype=complex)
    out = []
    for M, z in zip(family.matrices, point):
        N = M - z * np.eye(family.size)
        scale = max(1.0, np.linalg.norm(M, 2))
        cur, rank, end = v, 0, v
        while np.linalg.norm(cur) > tol * scale ** rank * max(1.0, np.linalg.norm(v)) and rank <= family.size:
            end = cur
            cur = N @ cur
            rank += 1
        out.append((rank, end))
    return out


def generalized_chains(family: OperatorFamily, data: SpectralData, max_rank: int = 2) -> List[ChainRecord]:
    """Rank-2 candidates: one per multiplicity-2 piece, paired with that piece's eigenvector."""
    records = []
    for idx, c in enumerate(data.clusters):
        if c.multiplicity != 2 or c.tangent is None:
            continue
        ranks = chain_ranks(family, c.tangent, c.point)
        if max(rk for rk, _ in ranks) > max_rank:
            continue
        records.append(ChainRecord(idx, c.tangent, tuple(rk for rk, _ in ranks), c.eigenvector))
    return records


def generalized_rank(M, v, mu, tol: float = 1e-8) -> int:
    """Smallest p with (M - mu)^p v = 0 (numerically)."""
    M = np.asarray(M, dtype=complex)
    v = np.asarray(v, dtype=complex)
    N = M - mu * np.eye(M.shape[0])
    scale = max(1.0, np.linalg.norm(M, 2))
    cur = v
    for p in range(M.shape[0] + 2):
        if np.linalg.norm(cur) <= tol * scale ** p * max(1.0, np.linalg.norm(v)):
            return p
        cur = N @ cur
    return M.shape[0] + 1
