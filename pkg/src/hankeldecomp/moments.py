"""Moment tables and Hankel blocks.

The functional extending f* is stored as a table indexed by exponent
vectors: entries of degree <= d are known rationals, entries above d are
named unknowns (slots) until a :class:`ParamAssignment` fills them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from . import qlinalg
from .errors import DegreeExceeded, UnassignedSlot
from .polyring import MultiIndex, Polynomial, add_index, dual_eval, monomials_up_to, unit


@dataclass(frozen=True, order=True)
class Slot:
    """Unknown moment at an exponent vector of degree > d."""

    alpha: MultiIndex

    @property
    def name(self) -> str:
        return "h_{" + ",".join(map(str, self.alpha)) + "}"

    def __repr__(self):
        return self.name


Entry = Union[Fraction, Slot]


class ParamAssignment:
    """Values for slots.  Rebinding a slot to a different value is an error."""

    def __init__(self, values: Optional[Mapping[Slot, object]] = None):
        self._values: Dict[Slot, object] = {}
        for s, v in (values or {}).items():
            self._set(s, v)

    def _set(self, slot, value):
        old = self._values.get(slot)
        if old is not None and old != value:
            raise ValueError(f"{slot.name} already assigned to {old}")
        self._values[slot] = value

    def with_values(self, values: Mapping[Slot, object]) -> "ParamAssignment":
        out = ParamAssignment(self._values)
        for s, v in values.items():
            out._set(s, v)
        return out

    def get(self, slot, default=None):
        return self._values.get(slot, default)

    def __contains__(self, slot):
        return slot in self._values

    def __len__(self):
        return len(self._values)

    def items(self):
        return self._values.items()

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self._values.values())

    def named(self) -> Dict[str, object]:
        return {s.name: v for s, v in sorted(self._values.items())}


class MomentTable:
    """Known moments f*(x^alpha) for |alpha| <= d, slots above."""

    def __init__(self, f: Polynomial, d: int):
        if not f.is_zero() and f.degree > d:
            raise DegreeExceeded(f"degree {f.degree} > {d}")
        self.nvars = f.nvars
        self.degree = d
        self.poly = f
        self._known: Dict[MultiIndex, Fraction] = {}

    def value(self, alpha: MultiIndex) -> Entry:
        alpha = tuple(alpha)
        if sum(alpha) > self.degree:
            return Slot(alpha)
        v = self._known.get(alpha)
        if v is None:
            v = dual_eval(self.poly, self.degree, alpha)
            self._known[alpha] = v
        return v

    def resolve(self, alpha: MultiIndex, assignment: Optional[ParamAssignment] = None):
        v = self.value(alpha)
        if isinstance(v, Slot):
            if assignment is None or v not in assignment:
                raise UnassignedSlot(v.name)
            return assignment.get(v)
        return v


def build_moment_table(f: Polynomial, d: int) -> MomentTable:
    return MomentTable(f, d)


def square_block(table: MomentTable) -> List[List[Fraction]]:
    """Largest fully known block: rows |a| <= ceil(d/2), columns |b| <= floor(d/2)."""
    d, n = table.degree, table.nvars
    rows = monomials_up_to(n, (d + 1) // 2)
    cols = monomials_up_to(n, d // 2)
    return [[table.value(add_index(a, b)) for b in cols] for a in rows]


def square_block_rank(table: MomentTable) -> int:
    return qlinalg.rank(square_block(table))


@dataclass
class HankelBlock:
    rows: Tuple[MultiIndex, ...]
    cols: Tuple[MultiIndex, ...]
    entries: List[List[object]]

    @property
    def slots(self) -> List[Slot]:
        found = {e for row in self.entries for e in row if isinstance(e, Slot)}
        return sorted(found)

    @property
    def is_numeric(self) -> bool:
        return not self.slots

    def numeric(self, assignment: Optional[ParamAssignment] = None):
        """Entries with every slot replaced; raises UnassignedSlot otherwise."""
        out = []
        for row in self.entries:
            new = []
            for e in row:
                if isinstance(e, Slot):
                    if assignment is None or e not in assignment:
                        raise UnassignedSlot(e.name)
                    e = assignment.get(e)
                new.append(e)
            out.append(new)
        return out

    def affine_parts(self, slots: Sequence[Slot], assignment: Optional[ParamAssignment] = None):
        """Split as A0 + sum_s h_s * E_s, with E_s the 0/1 pattern of slot s.

        Slots not listed in ``slots`` must be assigned; they are folded into A0.
        """
        index = {s: k for k, s in enumerate(slots)}
        r, c = len(self.rows), len(self.cols)
        A0 = [[Fraction(0)] * c for _ in range(r)]
        patterns: List[List[Tuple[int, int]]] = [[] for _ in slots]
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                if isinstance(e, Slot) and e in index:
                    patterns[index[e]].append((i, j))
                elif isinstance(e, Slot):
                    if assignment is None or e not in assignment:
                        raise UnassignedSlot(e.name)
                    A0[i][j] = assignment.get(e)
                else:
                    A0[i][j] = e
        return A0, patterns


def hankel_block(
    table: MomentTable,
    basis: Sequence[MultiIndex],
    shift: Optional[int] = None,
    assignment: Optional[ParamAssignment] = None,
    require_numeric: bool = False,
) -> HankelBlock:
    """(Lambda(b_i b_j)) or, with ``shift = k``, (Lambda(x_k b_i b_j)).

    Assigned slots are substituted; the rest stay as :class:`Slot` objects
    unless ``require_numeric`` asks for an error instead.
    """
    basis = tuple(tuple(b) for b in basis)
    offset = unit(table.nvars, shift) if shift is not None else (0,) * table.nvars
    entries = []
    for a in basis:
        row = []
        for b in basis:
            v = table.value(add_index(add_index(a, b), offset))
            if isinstance(v, Slot) and assignment is not None and v in assignment:
                v = assignment.get(v)
            row.append(v)
        entries.append(row)
    block = HankelBlock(basis, basis, entries)
    if require_numeric and block.slots:
        raise UnassignedSlot(", ".join(s.name for s in block.slots))
    return block
