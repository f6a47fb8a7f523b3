"""Tunable tolerances and search caps."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional


@dataclass(frozen=True)
class Config:
    # basis search
    degree_cap: str = "d"            # "d" or "r"
    max_rank: Optional[int] = None   # default: dim of the degree-d forms
    start_rank: Optional[int] = None # override the lower bound (diagnostics only)
    attempts: int = 3                # parameter draws per basis after a rejected solution
    # coordinates
    mix: bool = True
    mix_bound: int = 20
    coordinate_retries: int = 5
    # parameter solving
    det_retries: int = 8
    newton_restarts: int = 12
    outer_restarts: int = 4
    newton_iterations: int = 200
    commute_tol: float = 1e-10
    det_tol: float = 1e-12
    cond_cap: float = 1e12
    slot_bound: int = 10
    # spectral
    eig_tol: float = 1e-6
    cluster_tol: float = 1e-6
    svd_tol: float = 1e-8
    denominator_cap: int = 10 ** 6
    # final check
    verify_tol: float = 1e-8
    k_search_cap: int = 5000

    def with_(self, **kw) -> "Config":
        return replace(self, **kw)
