"""Waring, tangential and cactus decompositions.

All three drivers share one search: reduce to essential variables,
dehomogenize, start at the rank of the largest known Hankel block and walk
through complete staircases of growing size until a commuting fill is found
whose spectral data the mode accepts.  Per-attempt seeds depend only on
(seed, coordinates retry, r, basis index, attempt), so the three modes visit
the same fills in the same order; that is what makes cactus <= tangential <=
Waring hold run by run.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import qlinalg
from .conciseness import Reduction, reduce_to_essential
from .config import Config
from .errors import (
    DecompError,
    DegenerateNormalization,
    KExponentExhausted,
    MultiplicityMismatch,
)
from .moments import build_moment_table, square_block_rank
from .paramsolve import build_problem, solve, verify_outcome
from .polyring import (
    Polynomial,
    add_index,
    basis_key,
    dehomogenize,
    monomials_up_to,
    monomials_of_degree,
    mul_terms,
    add_terms,
    power_terms,
    substitute_terms,
    unit,
)
from .spectral import Cluster, OperatorFamily, SpectralData, analyze
from .staircases import enumerate_staircases

log = logging.getLogger(__name__)

MODES = ("waring", "tangential", "cactus")


@dataclass
class DecompositionReport:
    mode: str
    solved: bool
    rank: Optional[int] = None
    forms: List[list] = field(default_factory=list)
    weights: List[object] = field(default_factory=list)
    pairs: List[Tuple[int, int]] = field(default_factory=list)
    points: List[Optional[list]] = field(default_factory=list)
    multiplicities: List[int] = field(default_factory=list)
    exponents: List[int] = field(default_factory=list)     # power of L_i
    k: List[int] = field(default_factory=list)             # d - exponent + 1
    kbar: List[int] = field(default_factory=list)
    cofactors: List[dict] = field(default_factory=list)
    basis: List[tuple] = field(default_factory=list)
    params: Dict[str, object] = field(default_factory=dict)
    residual: object = None
    exact: bool = False
    seed: int = 0
    degree: int = 0
    nvars: int = 0
    essential: Optional[int] = None
    lower_bound: Optional[int] = None
    warnings: List[str] = field(default_factory=list)
    attempts: List[dict] = field(default_factory=list)
    k_search: List[Tuple[int, ...]] = field(default_factory=list)

    def terms(self):
        """The decomposition as (power, form, cofactor) triples in original variables."""
        out = []
        d = self.degree
        if self.mode == "cactus":
            for L, e, N in zip(self.forms, self.exponents, self.cofactors):
                out.append((e, L, N))
            return out
        paired = {b: [] for b, _ in self.pairs}
        for b, w in self.pairs:
            paired[b].append(w)
        directions = {w for _, w in self.pairs}
        n = len(self.forms[0]) if self.forms else 0
        for i, L in enumerate(self.forms):
            if i in directions:
                continue
            out.append((d, L, {(0,) * n: self.weights[i]}))
            for w in paired.get(i, []):
                out.append((d - 1, L, {unit(n, j): self.weights[w] * c for j, c in enumerate(self.forms[w]) if c != 0}))
        return out


# ------------------------------------------------------------------ utilities

def _derive_seed(*parts) -> int:
    return int(np.random.SeedSequence([int(p) & 0xFFFFFFFF for p in parts]).generate_state(1)[0])


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def _expand(terms_list, nvars: int) -> dict:
    """sum of L^e * N over (e, L, N) triples, as a term dict."""
    total: dict = {}
    for e, L, N in terms_list:
        total = add_terms(total, mul_terms(power_terms(list(L), e), N))
    return total


def verify(report: DecompositionReport, F: Polynomial, relative: bool = True):
    """Max-abs coefficient of (expansion - F), relative to F's largest coefficient.

    Exact Fraction when every number in the report is rational.
    """
    expanded = _expand(report.terms(), F.nvars)
    diff = add_terms(expanded, dict(F.items()), -1)
    err = max((abs(c) for c in diff.values()), default=0)
    if not relative:
        return err
    ref = max(abs(c) for _, c in F.items())
    if _is_exact(err):
        return Fraction(err) / ref
    return float(err) / float(ref)


def _rationalize(x, cap: int, tol: float = 1e-9) -> Optional[Fraction]:
    if _is_exact(x):
        return Fraction(x)
    x = complex(x)
    if abs(x.imag) > tol * (1 + abs(x)):
        return None
    q = Fraction(x.real).limit_denominator(cap)
    if abs(float(q) - x.real) > tol * (1 + abs(x)):
        return None
    return q


def _rationalize_vec(vec, cap):
    out = [_rationalize(v, cap) for v in vec]
    return None if any(q is None for q in out) else out


def _solve_final(columns: List[dict], target: dict, monos, exact: bool, tol: float):
    """Coefficients x with sum x_j columns_j = target, or None.

    The numeric route accepts a relative residual up to ``tol``; callers pass
    a loose value and polish afterwards.
    """
    if exact:
        A = [[Fraction(col.get(m, 0)) for col in columns] for m in monos]
        b = [Fraction(target.get(m, 0)) for m in monos]
        return qlinalg.solve(A, b)
    A = np.array([[complex(col.get(m, 0)) for col in columns] for m in monos], dtype=complex)
    b = np.array([complex(target.get(m, 0)) for m in monos], dtype=complex)
    if A.shape[1] == 0:
        return [] if np.linalg.norm(b) == 0 else None
    # equilibrate columns: a far-away point gives a huge column otherwise
    norms = np.abs(A).max(axis=0)
    norms[norms == 0] = 1.0
    y, *_ = np.linalg.lstsq(A / norms, b, rcond=None)
    x = y / norms
    res = np.linalg.norm(A @ x - b) / max(np.linalg.norm(b), 1e-300)
    if res > tol:
        return None
    return [complex(v) for v in x]


def _clean(x, tol=1e-13):
    """Drop negligible imaginary parts of numeric results."""
    if _is_exact(x):
        return Fraction(x)
    x = complex(x)
    if abs(x.imag) <= tol * max(1.0, abs(x)):
        return x.real
    return x


def _normalize_form(vec):
    """Scale so the first nonzero coordinate is 1; returns (form, scale)."""
    lead = next((c for c in vec if abs(c) > 0), None)
    if lead is None:
        return list(vec), 1
    return [_clean(c / lead) for c in vec], lead


def _sort_key(vec):
    return tuple((float(complex(c).real), float(complex(c).imag)) for c in vec)


def _chart_point(form):
    if abs(form[0]) == 0:
        return None
    return [_clean(c / form[0]) for c in form[1:]]


# -------------------------------------------------------------- reduced context

@dataclass
class _Context:
    F: Polynomial
    reduction: Reduction
    G: Polynomial
    d: int
    n: int                      # affine variables of the reduced problem
    monos: list                 # degree-d monomials in the reduced variables
    target: dict
    config: Config
    seed: int
    retry: int
    last_chart: bool = True
    near_miss: bool = False     # a candidate failed only on accuracy


class _ChartRetry(Exception):
    """Rank r failed only numerically in these coordinates."""


def _reduced_form(cluster: Cluster, family_basis, n, exact: bool):
    """(1, zeta_1..zeta_n) read from the eigenvector at 1 and the variables."""
    idx = [family_basis.index(unit(n, j)) for j in range(n)]
    if exact:
        v = cluster.exact_eigenvector
        return [Fraction(1)] + [v[i] for i in idx]
    # the eigenvalues locate the point more robustly than the eigenvector when it is far
    return [1.0 + 0j] + [complex(z) for z in cluster.point]


def _tangent_form(cluster: Cluster, family_basis, n, exact: bool):
    idx = [family_basis.index(unit(n, j)) for j in range(n)]
    if exact:
        w = cluster.exact_tangent
        return [Fraction(0)] + [w[i] for i in idx]
    w = cluster.tangent
    return [0j] + [complex(w[i]) for i in idx]


def _pull_terms(ctx: _Context, terms: dict) -> dict:
    rows = ctx.reduction.pullback_rows()
    return substitute_terms(terms, rows, ctx.F.nvars)


# ------------------------------------------------------------- numeric polish

def _polish(target: dict, m: int, forms, pieces, coeffs, fixed=None, iterations: int = 30):
    """Gauss-Newton refinement of sum L_i^e (sum c_a x^a) against ``target``.

    ``pieces`` is a list of (form index, exponent, cofactor monomials);
    ``coeffs`` the concatenated cofactor coefficients.  Coordinate
    ``fixed[i]`` of form i is held (default 0), which removes the scaling
    freedom.  Returns (forms, coeffs, relative residual).
    """
    d = pieces[0][1] + sum(pieces[0][2][0]) if pieces else 0
    monos = monomials_of_degree(m, d)
    row = {a: i for i, a in enumerate(monos)}
    fixed = fixed or [0] * len(forms)
    b = np.array([complex(target.get(a, 0)) for a in monos])
    bnorm = max(np.linalg.norm(b), 1e-300)
    forms = [np.array(L, dtype=complex) for L in forms]
    c = np.array(coeffs, dtype=complex)

    def vec(terms):
        out = np.zeros(len(monos), dtype=complex)
        for a, v in terms.items():
            out[row[a]] += v
        return out

    def evaluate(forms, c):
        cols, dcols = [], {}
        model = np.zeros(len(monos), dtype=complex)
        pos = 0
        for i, e, cm in pieces:
            Pe = power_terms(list(forms[i]), e)
            Pe1 = power_terms(list(forms[i]), e - 1) if e > 0 else {}
            N = {a: c[pos + t] for t, a in enumerate(cm)}
            for t, a in enumerate(cm):
                cols.append(vec(mul_terms(Pe, {a: 1})))
            model += sum((c[pos + t] * cols[pos + t] for t in range(len(cm))), np.zeros(len(monos), dtype=complex))
            if e > 0:
                LN = mul_terms(Pe1, N)
                for j in range(m):
                    if j == fixed[i]:
                        continue
                    dcols[(i, j)] = dcols.get((i, j), 0) + e * vec(mul_terms(LN, {unit(m, j): 1}))
            pos += len(cm)
        return model, cols, dcols

    res = np.inf
    for _ in range(iterations):
        model, cols, dcols = evaluate(forms, c)
        r = model - b
        res = np.linalg.norm(r) / bnorm
        if res <= 1e-15:
            break
        keys = sorted(dcols)
        J = np.column_stack(cols + [dcols[k] for k in keys])
        scale = np.abs(J).max(axis=0)
        scale[scale == 0] = 1.0
        step, *_ = np.linalg.lstsq(J / scale, -r, rcond=None)
        step /= scale
        new_c = c + step[:len(cols)]
        new_forms = [L.copy() for L in forms]
        for (i, j), s in zip(keys, step[len(cols):]):
            new_forms[i][j] += s
        new_res = np.linalg.norm(evaluate(new_forms, new_c)[0] - b) / bnorm
        if not new_res < res:
            break
        forms, c = new_forms, new_c
        res = new_res
    return [list(L) for L in forms], list(c), res


def _fit_numeric(ctx, forms, pieces, x0):
    """Polish a near-solution and keep it only if it meets the final tolerance."""
    forms, c, res = _polish(ctx.target, ctx.n + 1, forms, pieces, x0)
    if res > ctx.config.verify_tol:
        ctx.near_miss = True
        return None
    return forms, c


def _refine_report(report: DecompositionReport, F: Polynomial) -> DecompositionReport:
    """Polish a numeric report in the original variables.

    Pulling back through the change of coordinates costs accuracy; a few
    Gauss-Newton steps against F itself recover it.  The polished report is
    returned only if it re-expands better.
    """
    m, d = F.nvars, report.degree
    zero = (0,) * m
    lin = [unit(m, j) for j in range(m)]
    forms, pieces, x0 = [], [], []
    if report.mode == "waring":
        forms = [list(L) for L in report.forms]
        pieces = [(i, d, [zero]) for i in range(len(forms))]
        x0 = list(report.weights)
    elif report.mode == "tangential":
        direction = dict(report.pairs)
        s = len(report.forms) - len(report.pairs)
        forms = [list(L) for L in report.forms[:s]]
        for i, L in enumerate(forms):
            if i in direction:
                j = direction[i]
                pieces.append((i, d - 1, lin))
                x0.extend(report.weights[i] * a + report.weights[j] * w for a, w in zip(L, report.forms[j]))
            else:
                pieces.append((i, d, [zero]))
                x0.append(report.weights[i])
    else:
        forms = [list(L) for L in report.forms]
        for i, (e, N) in enumerate(zip(report.exponents, report.cofactors)):
            cm = monomials_of_degree(m, d - e)
            pieces.append((i, e, cm))
            x0.extend(N.get(a, 0) for a in cm)
    fixed = [next(j for j, c in enumerate(L) if abs(c) > 0) for L in forms]
    new_forms, c, _ = _polish(dict(F.items()), m, forms, pieces, x0, fixed)
    out = DecompositionReport(**{**report.__dict__})
    out.forms = [[_clean(v) for v in L] for L in new_forms]
    pos = 0
    if report.mode == "waring":
        out.weights = [_clean(v) for v in c]
    elif report.mode == "tangential":
        out.weights = list(report.weights)
        out.forms = out.forms + [list(W) for W in report.forms[len(forms):]]
        direction = dict(report.pairs)
        for i, (_, _, cm) in enumerate(pieces):
            vals = c[pos:pos + len(cm)]
            pos += len(cm)
            if len(cm) == 1:
                out.weights[i] = _clean(vals[0])
                continue
            P = new_forms[i]
            lam = vals[fixed[i]] / P[fixed[i]]
            W, wsc = _normalize_form([a - lam * b for a, b in zip(vals, P)])
            out.weights[i] = _clean(lam)
            out.forms[direction[i]] = W
            out.weights[direction[i]] = _clean(wsc)
    else:
        out.cofactors = []
        for _, _, cm in pieces:
            vals = c[pos:pos + len(cm)]
            pos += len(cm)
            big = max((abs(v) for v in vals), default=0)
            out.cofactors.append({a: _clean(v) for a, v in zip(cm, vals) if abs(v) > 1e-15 * big})
    out.points = [_chart_point(L) for L in out.forms[:len(forms)]]
    if verify(out, F) < verify(report, F):
        return out
    return report


# ------------------------------------------------------------- mode acceptors

def _loose(ctx, exact):
    return 0 if exact else ctx.config.verify_tol ** 0.5


def _numeric_or_exact(ctx, data: SpectralData, build):
    """Run ``build(exact, forms_source)`` exactly if possible, else numerically.

    ``build`` returns None when its final system is unsolvable.  The exact
    route is tried with exact spectral data, then with rationalized data.
    """
    if data.exact:
        return build(True, "exact")
    res = build(True, "rationalized")
    if res is not None:
        return res
    return build(False, "numeric")


def _accept_waring(ctx: _Context, data: SpectralData, basis):
    if any(c.multiplicity != 1 for c in data.clusters):
        return None, "support is not reduced (a point has multiplicity > 1)"
    n, d = ctx.n, ctx.d

    def build(exact, source):
        forms = []
        for c in data.clusters:
            if source == "exact":
                L = _reduced_form(c, basis, n, True)
            elif source == "rationalized":
                L = _rationalize_vec(_reduced_form(c, basis, n, c.is_exact), ctx.config.denominator_cap)
                if L is None:
                    return None
            else:
                L = _reduced_form(c, basis, n, False)
            forms.append(L)
        cols = [power_terms(L, d) for L in forms]
        x = _solve_final(cols, ctx.target, ctx.monos, exact, _loose(ctx, exact))
        if x is None:
            return None
        if not exact:
            pieces = [(i, d, [(0,) * (n + 1)]) for i in range(len(forms))]
            out = _fit_numeric(ctx, forms, pieces, x)
            if out is None:
                return None
            forms, x = out
        return forms, x, exact

    out = _numeric_or_exact(ctx, data, build)
    if out is None:
        return None, "final linear system has no solution"
    forms, lam, exact = out
    full = []
    for L, w in zip(forms, lam):
        P, scale = _normalize_form(ctx.reduction.pullback_form(L))
        full.append((P, _clean(w * scale ** d)))
    full.sort(key=lambda t: _sort_key(t[0]))
    rep = DecompositionReport("waring", True, rank=len(full))
    rep.forms = [P for P, _ in full]
    rep.weights = [w for _, w in full]
    rep.points = [_chart_point(P) for P in rep.forms]
    rep.multiplicities = [1] * len(full)
    rep.exponents = [d] * len(full)
    rep.k = [1] * len(full)
    rep.kbar = [1] * len(full)
    rep.exact = exact
    return rep, "accepted"


def _accept_tangential(ctx: _Context, data: SpectralData, basis):
    if any(c.multiplicity > 2 for c in data.clusters):
        return None, "a point has multiplicity > 2"
    for c in data.clusters:
        if c.multiplicity == 2 and (c.tangent is None or c.kbar != 2):
            return None, "double point without a rank-2 chain"
    n, d = ctx.n, ctx.d

    def build(exact, source):
        bases, dirs = [], []
        for c in data.clusters:
            use_exact = source == "exact" or (source == "rationalized" and c.is_exact)
            L = _reduced_form(c, basis, n, use_exact)
            W = _tangent_form(c, basis, n, use_exact) if c.multiplicity == 2 else None
            if source == "rationalized":
                L = _rationalize_vec(L, ctx.config.denominator_cap)
                W = None if W is None else _rationalize_vec(W, ctx.config.denominator_cap)
                if L is None or (c.multiplicity == 2 and W is None):
                    return None
            bases.append(L)
            dirs.append(W)
        cols = [power_terms(L, d) for L in bases]
        pair_idx = []
        for i, (L, W) in enumerate(zip(bases, dirs)):
            if W is not None:
                cols.append(mul_terms(power_terms(L, d - 1), {unit(n + 1, j): c for j, c in enumerate(W) if c != 0}))
                pair_idx.append(i)
        x = _solve_final(cols, ctx.target, ctx.monos, exact, _loose(ctx, exact))
        if x is None:
            return None
        if not exact:
            # refine with L^(d-1) * (lambda L + mu W) as one piece with a linear cofactor
            s = len(bases)
            lin = [unit(n + 1, j) for j in range(n + 1)]
            pieces, x0 = [], []
            for i, (L, W) in enumerate(zip(bases, dirs)):
                if W is None:
                    pieces.append((i, d, [(0,) * (n + 1)]))
                    x0.append(x[i])
                else:
                    mu = x[s + pair_idx.index(i)]
                    pieces.append((i, d - 1, lin))
                    x0.extend(x[i] * a + mu * w for a, w in zip(L, W))
            out = _fit_numeric(ctx, bases, pieces, x0)
            if out is None:
                return None
            bases, c = out
            x = [0j] * (s + len(pair_idx))
            pos = 0
            for i, (_, _, cm) in enumerate(pieces):
                if len(cm) == 1:
                    x[i] = c[pos]
                else:
                    N = c[pos:pos + len(cm)]
                    # leading coordinate of L is 1, so N - N[0] L vanishes there
                    x[i] = N[0]
                    dirs[i] = [a - N[0] * l for a, l in zip(N, bases[i])]
                    x[s + pair_idx.index(i)] = 1
                pos += len(cm)
        return bases, dirs, pair_idx, x, exact

    out = _numeric_or_exact(ctx, data, build)
    if out is None:
        return None, "final linear system has no solution"
    bases, dirs, pair_idx, x, exact = out
    s = len(bases)
    entries = []
    for i, L in enumerate(bases):
        P, sc = _normalize_form(ctx.reduction.pullback_form(L))
        lam = _clean(x[i] * sc ** d)
        direction = None
        if i in pair_idx:
            mu = x[s + pair_idx.index(i)]
            Wraw = ctx.reduction.pullback_form(dirs[i])
            # W modulo L: zero at L's leading coordinate, the L part moves into lambda
            piv = next(j for j, c in enumerate(P) if c != 0)
            shift = Wraw[piv]
            lam = _clean(lam + mu * sc ** (d - 1) * shift)
            Wp, wsc = _normalize_form([a - shift * b for a, b in zip(Wraw, P)])
            direction = (Wp, _clean(mu * wsc * sc ** (d - 1)))
        entries.append((P, lam, direction))
    entries.sort(key=lambda t: _sort_key(t[0]))
    rep = DecompositionReport("tangential", True)
    rep.forms = [P for P, _, _ in entries]
    rep.weights = [lam for _, lam, _ in entries]
    for i, (_, _, direction) in enumerate(entries):
        if direction is not None:
            rep.pairs.append((i, len(rep.forms)))
            rep.forms.append(direction[0])
            rep.weights.append(direction[1])
    rep.rank = s + len(rep.pairs)
    rep.points = [_chart_point(P) for P, _, _ in entries]
    rep.multiplicities = [2 if e[2] is not None else 1 for e in entries]
    rep.exponents = [d] * s
    rep.k = [m for m in rep.multiplicities]
    rep.kbar = list(rep.k)
    rep.exact = exact
    return rep, "accepted"


def _k_vectors(lower: Sequence[int], upper: int, cap: int):
    """Vectors k >= lower (entrywise, each <= upper) by total, then lexicographic."""
    s = len(lower)
    count = 0
    for total in range(sum(lower), s * upper + 1):
        def rec(i, remaining):
            if i == s - 1:
                if lower[i] <= remaining <= upper:
                    yield (remaining,)
                return
            for v in range(lower[i], min(upper, remaining) + 1):
                for tail in rec(i + 1, remaining - v):
                    yield (v,) + tail
        for k in rec(0, total):
            yield k
            count += 1
            if count >= cap:
                return


def _accept_cactus(ctx: _Context, data: SpectralData, basis):
    n, d = ctx.n, ctx.d
    kbar = [min(c.kbar, d) for c in data.clusters]
    tried: List[Tuple[int, ...]] = []

    def build(exact, source):
        tried.clear()
        forms = []
        for c in data.clusters:
            use_exact = source == "exact" or (source == "rationalized" and c.is_exact)
            L = _reduced_form(c, basis, n, use_exact)
            if source == "rationalized":
                L = _rationalize_vec(L, ctx.config.denominator_cap)
                if L is None:
                    return None
            forms.append(L)
        powers = {}
        for k in _k_vectors(kbar, d, ctx.config.k_search_cap):
            tried.append(k)
            cols, owners = [], []
            for i, (L, ki) in enumerate(zip(forms, k)):
                key = (i, d - ki + 1)
                if key not in powers:
                    powers[key] = power_terms(L, d - ki + 1)
                for alpha in monomials_of_degree(n + 1, ki - 1):
                    cols.append(mul_terms(powers[key], {alpha: 1}))
                    owners.append((i, alpha))
            x = _solve_final(cols, ctx.target, ctx.monos, exact, _loose(ctx, exact))
            if x is None:
                continue
            if not exact:
                pieces = [(i, d - ki + 1, list(monomials_of_degree(n + 1, ki - 1))) for i, ki in enumerate(k)]
                out = _fit_numeric(ctx, forms, pieces, x)
                if out is None:
                    continue
                forms, x = out
            return forms, k, owners, x, exact
        return None

    out = _numeric_or_exact(ctx, data, build)
    if out is None:
        raise KExponentExhausted(f"no exponent vector k <= {d} makes the final system solvable")
    forms, k, owners, x, exact = out
    cof = [dict() for _ in forms]
    for (i, alpha), v in zip(owners, x):
        if v != 0:
            cof[i][alpha] = v
    entries = []
    for c, L, ki, N in zip(data.clusters, forms, k, cof):
        P, sc = _normalize_form(ctx.reduction.pullback_form(L))
        e = d - ki + 1
        Np = _pull_terms(ctx, {a: v * sc ** e for a, v in N.items()})
        Np = {a: _clean(v) for a, v in Np.items() if abs(v) > 0}
        entries.append((P, c.multiplicity, ki, c.kbar, Np))
    entries.sort(key=lambda t: _sort_key(t[0]))
    rep = DecompositionReport("cactus", True)
    rep.forms = [e[0] for e in entries]
    rep.points = [_chart_point(e[0]) for e in entries]
    rep.multiplicities = [e[1] for e in entries]
    rep.k = [e[2] for e in entries]
    rep.kbar = [e[3] for e in entries]
    rep.exponents = [d - e[2] + 1 for e in entries]
    rep.cofactors = [e[4] for e in entries]
    rep.weights = []
    rep.rank = sum(rep.multiplicities)
    rep.exact = exact
    rep.k_search = tried
    return rep, "accepted"


_ACCEPT = {"waring": _accept_waring, "tangential": _accept_tangential, "cactus": _accept_cactus}


# ------------------------------------------------------------------- drivers

def _single_variable(ctx: _Context, mode: str) -> DecompositionReport:
    """F = c * L^d with one essential variable."""
    d = ctx.d
    c = ctx.G.coeff((d,))
    P, sc = _normalize_form(ctx.reduction.pullback_form([Fraction(1)]))
    w = c * sc ** d
    rep = DecompositionReport(mode, True, rank=1, forms=[P], points=[_chart_point(P)], multiplicities=[1],
                              exponents=[d], k=[1], kbar=[1], basis=[()], exact=True)
    if mode == "cactus":
        rep.cofactors = [{(0,) * ctx.F.nvars: w}]
    else:
        rep.weights = [w]
    return rep


def _search(ctx: _Context, mode: str) -> DecompositionReport:
    cfg = ctx.config
    f = dehomogenize(ctx.G)
    table = build_moment_table(f, ctx.d)
    lower = square_block_rank(table)
    r = cfg.start_rank if cfg.start_rank is not None else lower
    max_rank = cfg.max_rank if cfg.max_rank is not None else comb(ctx.n + ctx.d, ctx.d)
    attempts_log: List[dict] = []
    unproven = False
    accept = _ACCEPT[mode]
    while r <= max_rank:
        cap = ctx.d if cfg.degree_cap == "d" else max(r, ctx.d)
        for bi, B in enumerate(enumerate_staircases(ctx.n, r, cap)):
            basis = B.monomials
            problem = build_problem(table, basis)
            for a in range(cfg.attempts):
                s = _derive_seed(ctx.seed, ctx.retry, r, bi, a)
                entry = {"r": r, "basis": [list(b) for b in basis], "attempt": a}
                outcome = solve(problem, s, cfg)
                entry["stage"] = outcome.stage
                if not outcome.solved:
                    entry["result"] = "no commuting fill: " + outcome.message
                    if outcome.stage == "newton":
                        unproven = True
                    attempts_log.append(entry)
                    break
                if not verify_outcome(problem, outcome, cfg):
                    entry["result"] = "fill failed re-verification"
                    attempts_log.append(entry)
                    break
                if outcome.exact:
                    family = OperatorFamily.from_exact(outcome.operators, basis)
                else:
                    family = OperatorFamily.from_numeric(outcome.operators, basis)
                try:
                    data = analyze(family, _derive_seed(s, 7), cfg)
                except MultiplicityMismatch as exc:
                    entry["result"] = f"spectral analysis failed: {exc}"
                    ctx.near_miss = True
                    attempts_log.append(entry)
                    continue
                report, reason = accept(ctx, data, basis)
                entry["result"] = reason
                attempts_log.append(entry)
                if report is not None:
                    report.degree, report.nvars = ctx.d, ctx.F.nvars
                    if not report.exact:
                        report = _refine_report(report, ctx.F)
                    residual = verify(report, ctx.F)
                    ok = residual == 0 if report.exact else residual <= cfg.verify_tol
                    if not ok:
                        entry["result"] = f"re-expansion residual {float(residual):.3g} too large"
                        ctx.near_miss = True
                        if not problem.free_slots:
                            break
                        continue
                    report.residual = residual
                    report.basis = [tuple(b) for b in basis]
                    report.params = outcome.assignment.named() if outcome.assignment else {}
                    report.lower_bound = lower
                    report.attempts = attempts_log
                    if unproven:
                        report.warnings.append(
                            "rank may be overestimated if the commutation variety has unvisited components"
                        )
                    return report
                if not problem.free_slots:
                    break
        if ctx.near_miss and not ctx.last_chart:
            raise _ChartRetry(r)
        ctx.near_miss = False
        r += 1
    rep = DecompositionReport(mode, False, lower_bound=lower, attempts=attempts_log)
    rep.warnings.append(f"budget exhausted: no accepted decomposition up to rank {max_rank}")
    return rep


def _chart_condition(G: Polynomial, d: int) -> float:
    """Condition number of the Hankel block on the first staircase of the search.

    In generic coordinates the graded prefix of size rank(square block) is
    nonsingular; a zero determinant usually means a point of the decomposition
    sits on the hyperplane used to dehomogenize, and a large condition number
    means one is close to it.
    """
    table = build_moment_table(dehomogenize(G), d)
    r0 = square_block_rank(table)
    n = G.nvars - 1
    prefix = sorted(monomials_up_to(n, d // 2), key=basis_key)[:r0]
    H = [[table.value(add_index(a, b)) for b in prefix] for a in prefix]
    if qlinalg.det(H) == 0:
        return float("inf")
    return float(np.linalg.cond(np.array(H, dtype=float)))


def _charts(F: Polynomial, d: int, config: Config, seed: int):
    """Coordinate changes to try, best conditioned first."""
    if not config.mix:
        return [(0, reduce_to_essential(F, _derive_seed(seed, 1000), config.mix_bound, False))]
    charts = []
    for retry in range(config.coordinate_retries):
        red = reduce_to_essential(F, _derive_seed(seed, 1000 + retry), config.mix_bound, True)
        cond = _chart_condition(red.poly, d) if red.poly.nvars > 1 else 1.0
        charts.append((cond, retry, red))
    charts.sort(key=lambda t: (t[0], t[1]))
    return [(retry, red) for _, retry, red in charts]


def _run(F: Polynomial, mode: str, config: Optional[Config], seed: int) -> DecompositionReport:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    config = config or Config()
    d = F.require_homogeneous()
    if d < 1:
        raise ValueError("the polynomial must have positive degree")
    warnings: List[str] = []
    report = None
    charts = _charts(F, d, config, seed)
    for pos, (retry, red) in enumerate(charts):
        G = red.poly
        ctx = _Context(F, red, G, d, G.nvars - 1, monomials_of_degree(G.nvars, d), dict(G.items()),
                       config, seed, retry, last_chart=pos == len(charts) - 1)
        try:
            if G.nvars == 1 or d == 1:
                report = _single_variable(ctx, mode) if G.nvars == 1 else None
                if report is None:
                    raise DecompError("linear input with several essential variables")
                report.degree, report.nvars = d, F.nvars
                report.residual = verify(report, F)
                report.lower_bound = 1
            else:
                report = _search(ctx, mode)
        except _ChartRetry as exc:
            warnings.append(f"coordinates retry {retry}: rank {exc.args[0]} only failed numerically, redrawing")
            continue
        except DegenerateNormalization as exc:
            warnings.append(f"coordinates retry {retry}: {exc}")
            if not config.mix:
                break
            continue
        report.essential = G.nvars
        break
    if report is None:
        report = DecompositionReport(mode, False)
        report.warnings.append("degenerate coordinates on every retry")
    report.warnings = warnings + report.warnings
    report.seed = seed
    report.degree = d
    report.nvars = F.nvars
    return report


def waring(F: Polynomial, config: Optional[Config] = None, seed: int = 0) -> DecompositionReport:
    return _run(F, "waring", config, seed)


def tangential(F: Polynomial, config: Optional[Config] = None, seed: int = 0) -> DecompositionReport:
    return _run(F, "tangential", config, seed)


def cactus(F: Polynomial, config: Optional[Config] = None, seed: int = 0) -> DecompositionReport:
    return _run(F, "cactus", config, seed)


def decompose(F: Polynomial, mode: str = "waring", config: Optional[Config] = None, seed: int = 0):
    return _run(F, mode, config, seed)
