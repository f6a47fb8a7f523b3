"""Enumeration of complete staircases (divisor-closed monomial sets containing
1 and every variable)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterator, List, Optional, Set, Tuple

from .polyring import MultiIndex, basis_key, unit

Monomial = MultiIndex


@dataclass(frozen=True)
class StaircaseBasis:
    monomials: Tuple[Monomial, ...]
    nvars: int
    degree_cap: int

    def __post_init__(self):
        ordered = tuple(sorted(set(self.monomials), key=basis_key))
        if len(ordered) != len(self.monomials):
            raise ValueError("duplicate monomials")
        object.__setattr__(self, "monomials", ordered)
        if not is_complete_staircase(ordered, self.nvars):
            raise ValueError("not a complete staircase")
        if max(sum(m) for m in ordered) > self.degree_cap:
            raise ValueError("monomial above the degree cap")

    def __len__(self):
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    @property
    def degree_sum(self) -> int:
        return sum(sum(m) for m in self.monomials)


def _divisors_one_step(m: Monomial) -> List[Monomial]:
    return [m[:i] + (m[i] - 1,) + m[i + 1:] for i in range(len(m)) if m[i]]


def is_staircase(monos, n: int) -> bool:
    s = set(map(tuple, monos))
    return all(len(m) == n for m in s) and all(p in s for m in s for p in _divisors_one_step(m))


def is_complete_staircase(monos, n: int) -> bool:
    s = set(map(tuple, monos))
    needed = [(0,) * n] + [unit(n, i) for i in range(n)]
    return all(m in s for m in needed) and is_staircase(s, n)


def _grow(current: List[Monomial], members: Set[Monomial], size: int, cap: int, n: int):
    """Depth-first: only add monomials larger (basis order) than the last one."""
    if len(current) == size:
        yield tuple(current)
        return
    last = basis_key(current[-1])
    # candidates: x_i * m for m in the set, above the last element, all divisors present
    cands = set()
    for m in members:
        for i in range(n):
            c = m[:i] + (m[i] + 1,) + m[i + 1:]
            if c not in members and sum(c) <= cap and basis_key(c) > last:
                if all(p in members for p in _divisors_one_step(c)):
                    cands.add(c)
    for c in sorted(cands, key=basis_key):
        members.add(c)
        current.append(c)
        yield from _grow(current, members, size, cap, n)
        current.pop()
        members.discard(c)


def enumerate_staircases(n: int, size: int, degree_cap: Optional[int] = None) -> Iterator[StaircaseBasis]:
    """Every complete staircase of ``size`` monomials, each exactly once.

    Sets with smaller total degree come first, ties broken lexicographically
    on the sorted monomial lists.
    """
    if size < n + 1:
        return iter(())
    cap = size if degree_cap is None else degree_cap
    start = [(0,) * n] + [unit(n, i) for i in reversed(range(n))]
    start = sorted(start, key=basis_key)
    if n == 0:
        start = [()]
    found = list(_grow(list(start), set(start), size, cap, n)) if size > len(start) else [tuple(start)]
    found = [f for f in found if len(f) == size]

    def order(monos):
        ordered = sorted(monos, key=basis_key)
        return (sum(sum(m) for m in ordered), [basis_key(m) for m in ordered])

    found.sort(key=order)
    return (StaircaseBasis(tuple(f), n, cap) for f in found)


# short alias
enumerate = enumerate_staircases  # noqa: A001


def connected_to_one(n: int, size: int) -> List[FrozenSet[Monomial]]:
    """All monomial sets of the given size containing 1 in which every
    element other than 1 is x_i times another element."""
    one = (0,) * n
    level = {frozenset([one])}
    for _ in range(size - 1):
        nxt = set()
        for s in level:
            for m in s:
                for i in range(n):
                    c = m[:i] + (m[i] + 1,) + m[i + 1:]
                    if c not in s:
                        nxt.add(s | {c})
        level = nxt
    return sorted(level, key=lambda s: sorted(s))


def count_connected_to_one(n: int, size: int) -> int:
    return len(connected_to_one(n, size))
