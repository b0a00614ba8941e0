"""The two measure-space families everything is computed on.

``FiniteSpace``
    ``n_points`` atoms, each with an ``XReal`` mass (possibly infinite).
    Every subset is measurable.

``IntervalSpace``
    ``[0, 1)`` with Lebesgue measure.  Measurable sets are finite unions of
    half-open intervals, index functions are step functions.

Both families make every preimage of an index function measurable by
construction, so measurability never has to be checked at run time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .extreal import XReal, xr_sum

# shortest admissible interval / step cell
MIN_CELL = 1e-12


class SpaceMismatch(ValueError):
    pass


# --------------------------------------------------------------------------
# measurable sets

@dataclass(frozen=True)
class PointSet:
    """Sorted distinct atom indices of a FiniteSpace."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in idx):
            raise ValueError("point indices must be >= 0")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("point indices must be strictly increasing")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, indices) -> PointSet:
        return cls(tuple(sorted(set(int(i) for i in indices))))

    def is_empty(self) -> bool:
        return not self.indices

    def to_json(self):
        return list(self.indices)


@dataclass(frozen=True)
class IntervalSet:
    """Sorted disjoint half-open intervals ``[a, b)`` inside ``[0, 1)``."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        prev = 0.0
        for a, b in ivs:
            if not (0.0 <= a and b <= 1.0):
                raise ValueError(f"interval [{a}, {b}) not inside [0, 1)")
            if b - a < MIN_CELL:
                raise ValueError(f"interval [{a}, {b}) is empty or shorter than {MIN_CELL}")
            if a < prev:
                raise ValueError("intervals must be sorted and disjoint")
            prev = b
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def of(cls, intervals) -> IntervalSet:
        """Sort, merge overlapping/adjacent pieces, and drop empty ones."""
        ivs = sorted((float(a), float(b)) for a, b in intervals if b > a)
        merged: list[list[float]] = []
        for a, b in ivs:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged))

    def is_empty(self) -> bool:
        return not self.intervals

    def length(self) -> float:
        return math.fsum(b - a for a, b in self.intervals)

    def to_json(self):
        return [list(iv) for iv in self.intervals]


MSet = Union[PointSet, IntervalSet]


# --------------------------------------------------------------------------
# index functions (the ``which`` field of a simple function)

class Table:
    """Index function on a FiniteSpace: one index per atom."""

    def __init__(self, indices):
        arr = np.asarray(indices)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("Table needs a nonempty 1-d index array")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise ValueError("Table indices must be natural numbers")
        arr = arr.astype(np.int64)
        if arr.min() < 0:
            raise ValueError("Table indices must be natural numbers")
        arr.flags.writeable = False
        self.indices = arr

    @property
    def cell_indices(self) -> np.ndarray:
        return self.indices

    def bound(self) -> int:
        return int(self.indices.max())

    def __call__(self, x):
        return self.indices[x]

    def __eq__(self, other):
        return isinstance(other, Table) and np.array_equal(self.indices, other.indices)

    def __repr__(self):
        return f"Table({self.indices.tolist()})"

    def to_json(self):
        return {"table": self.indices.tolist()}


class StepFn:
    """Index function on ``[0, 1)``: constant index on each ``[t_i, t_{i+1})``."""

    def __init__(self, breaks, indices):
        br = np.asarray(breaks, dtype=float)
        idx = np.asarray(indices)
        if br.ndim != 1 or br.size < 2:
            raise ValueError("StepFn needs at least the breakpoints 0 and 1")
        if br[0] != 0.0 or br[-1] != 1.0:
            raise ValueError("StepFn breakpoints must span [0, 1)")
        if np.any(np.diff(br) < MIN_CELL):
            raise ValueError(f"StepFn breakpoints must increase by at least {MIN_CELL}")
        if idx.shape != (br.size - 1,):
            raise ValueError("StepFn needs one index per cell")
        if idx.size and not np.issubdtype(idx.dtype, np.integer):
            if not np.all(np.equal(np.mod(idx, 1), 0)):
                raise ValueError("StepFn indices must be natural numbers")
        idx = idx.astype(np.int64)
        if idx.min() < 0:
            raise ValueError("StepFn indices must be natural numbers")
        br.flags.writeable = False
        idx.flags.writeable = False
        self.breaks = br
        self.indices = idx

    @property
    def cell_indices(self) -> np.ndarray:
        return self.indices

    def bound(self) -> int:
        return int(self.indices.max())

    def cell_of(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x < 0.0) | (x >= 1.0)):
            raise ValueError("point outside [0, 1)")
        return np.searchsorted(self.breaks, x, side="right") - 1

    def __call__(self, x):
        return self.indices[self.cell_of(x)]

    def __eq__(self, other):
        return (isinstance(other, StepFn) and np.array_equal(self.breaks, other.breaks)
                and np.array_equal(self.indices, other.indices))

    def __repr__(self):
        return f"StepFn({self.breaks.tolist()}, {self.indices.tolist()})"

    def to_json(self):
        return {"breaks": self.breaks.tolist(), "indices": self.indices.tolist()}


IndexFn = Union[Table, StepFn]


def index_fn_from_json(obj) -> IndexFn:
    if "table" in obj:
        return Table(obj["table"])
    return StepFn(obj["breaks"], obj["indices"])


# --------------------------------------------------------------------------
# spaces

class FiniteSpace:
    """Finitely many atoms with (possibly infinite) masses."""

    def __init__(self, masses: Sequence):
        ms = tuple(m if isinstance(m, XReal) else XReal.from_json(m) for m in masses)
        if not ms:
            raise ValueError("a measure space must be nonempty")
        self.masses = ms
        arr = np.array([m.value for m in ms])
        arr.flags.writeable = False
        self.mass_array = arr

    @property
    def n_points(self) -> int:
        return len(self.masses)

    def __eq__(self, other):
        return isinstance(other, FiniteSpace) and self.masses == other.masses

    def __hash__(self):
        return hash(self.masses)

    def __repr__(self):
        return f"FiniteSpace({[m.to_json() for m in self.masses]})"

    def contains(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and 0 <= x < self.n_points

    def whole(self) -> PointSet:
        return PointSet(tuple(range(self.n_points)))

    def empty(self) -> PointSet:
        return PointSet()

    def total_measure(self) -> XReal:
        return xr_sum(self.masses)

    def check_set(self, s: MSet):
        if not isinstance(s, PointSet) or (s.indices and s.indices[-1] >= self.n_points):
            raise SpaceMismatch(f"{s!r} is not a subset of {self!r}")

    def check_index_fn(self, w: IndexFn):
        if not isinstance(w, Table) or w.indices.size != self.n_points:
            raise SpaceMismatch(f"{w!r} is not an index function on {self!r}")

    def cell_measures(self, w: IndexFn) -> np.ndarray:
        self.check_index_fn(w)
        return self.mass_array

    def to_json(self):
        return {"space": "finite", "masses": [m.to_json() for m in self.masses]}


class IntervalSpace:
    """``[0, 1)`` with Lebesgue measure."""

    def __eq__(self, other):
        return isinstance(other, IntervalSpace)

    def __hash__(self):
        return hash("IntervalSpace")

    def __repr__(self):
        return "IntervalSpace()"

    def contains(self, x) -> bool:
        return isinstance(x, (float, int, np.floating)) and 0.0 <= x < 1.0

    def whole(self) -> IntervalSet:
        return IntervalSet(((0.0, 1.0),))

    def empty(self) -> IntervalSet:
        return IntervalSet()

    def total_measure(self) -> XReal:
        return XReal(1.0)

    def check_set(self, s: MSet):
        if not isinstance(s, IntervalSet):
            raise SpaceMismatch(f"{s!r} is not a subset of {self!r}")

    def check_index_fn(self, w: IndexFn):
        if not isinstance(w, StepFn):
            raise SpaceMismatch(f"{w!r} is not an index function on {self!r}")

    def cell_measures(self, w: IndexFn) -> np.ndarray:
        self.check_index_fn(w)
        return np.diff(w.breaks)

    def to_json(self):
        return {"space": "interval"}


MeasureSpace = Union[FiniteSpace, IntervalSpace]


def space_from_json(obj) -> MeasureSpace:
    kind = obj.get("space")
    if kind == "finite":
        masses = obj.get("masses")
        if not isinstance(masses, list) or not masses:
            raise ValueError("masses: expected a nonempty list")
        parsed = []
        for i, m in enumerate(masses):
            try:
                parsed.append(XReal.from_json(m))
            except ValueError as exc:
                raise ValueError(f"masses[{i}]: {exc}") from None
        return FiniteSpace(parsed)
    if kind == "interval":
        return IntervalSpace()
    raise ValueError(f"space: unknown kind {kind!r}")


def mset_from_json(space: MeasureSpace, obj) -> MSet:
    if isinstance(space, FiniteSpace):
        s = PointSet.of(obj)
    else:
        s = IntervalSet.of([tuple(iv) for iv in obj])
    space.check_set(s)
    return s


# --------------------------------------------------------------------------
# operations on sets

def measure_of(space: MeasureSpace, s: MSet) -> XReal:
    space.check_set(s)
    if isinstance(s, PointSet):
        return xr_sum(space.masses[i] for i in s.indices)
    return XReal(s.length())


def contains(space: MeasureSpace, s: MSet, x) -> bool:
    space.check_set(s)
    if isinstance(s, PointSet):
        return x in s.indices
    return any(a <= x < b for a, b in s.intervals)


def union(space: MeasureSpace, s: MSet, t: MSet) -> MSet:
    space.check_set(s)
    space.check_set(t)
    if isinstance(s, PointSet):
        return PointSet.of(s.indices + t.indices)
    return IntervalSet.of(s.intervals + t.intervals)


def intersection(space: MeasureSpace, s: MSet, t: MSet) -> MSet:
    space.check_set(s)
    space.check_set(t)
    if isinstance(s, PointSet):
        return PointSet.of(set(s.indices) & set(t.indices))
    out = []
    for a, b in s.intervals:
        for c, d in t.intervals:
            lo, hi = max(a, c), min(b, d)
            if hi > lo:
                out.append((lo, hi))
    return IntervalSet.of(out)


def complement(space: MeasureSpace, s: MSet) -> MSet:
    space.check_set(s)
    if isinstance(s, PointSet):
        return PointSet.of(set(range(space.n_points)) - set(s.indices))
    out, prev = [], 0.0
    for a, b in s.intervals:
        if a > prev:
            out.append((prev, a))
        prev = b
    if prev < 1.0:
        out.append((prev, 1.0))
    return IntervalSet.of(out)


def preimage(space: MeasureSpace, w: IndexFn, n: int) -> MSet:
    """The set ``{x : w(x) = n}``; adjacent step cells are merged."""
    space.check_index_fn(w)
    if isinstance(w, Table):
        return PointSet(tuple(int(i) for i in np.flatnonzero(w.indices == n)))
    cells = np.flatnonzero(w.indices == n)
    return IntervalSet.of((w.breaks[c], w.breaks[c + 1]) for c in cells)


def pair_index(i: int, j: int, nB: int) -> int:
    return i * (nB + 1) + j


def unpair_index(k, nB: int):
    """Inverse of :func:`pair_index`; works elementwise on arrays."""
    return k // (nB + 1), k % (nB + 1)


def refine(wA: IndexFn, wB: IndexFn, nB: int) -> IndexFn:
    """Joint index function ``x -> pair_index(wA(x), wB(x), nB)``."""
    if isinstance(wA, Table) and isinstance(wB, Table):
        if wA.indices.size != wB.indices.size:
            raise SpaceMismatch("index tables over different spaces")
        return Table(pair_index(wA.indices, wB.indices, nB))
    if isinstance(wA, StepFn) and isinstance(wB, StepFn):
        br = np.union1d(wA.breaks, wB.breaks)
        mid = 0.5 * (br[:-1] + br[1:])
        return StepFn(br, pair_index(wA(mid), wB(mid), nB))
    raise SpaceMismatch("cannot refine index functions over different space families")


def present_parts(space: MeasureSpace, w: IndexFn):
    """Measures of the nonempty preimages of ``w``.

    Returns ``(indices, finite, infinite)``: the sorted indices actually
    taken by ``w``, the sum of finite cell masses for each, and a flag for
    an infinite one.  Indices not returned have empty preimage (measure 0).
    This is the vectorized form of ``measure_of(space, preimage(space, w, n))``.
    """
    meas = space.cell_measures(w)
    idx, inv = np.unique(w.cell_indices, return_inverse=True)
    inf_cell = np.isinf(meas)
    finite = np.bincount(inv, weights=np.where(inf_cell, 0.0, meas), minlength=idx.size)
    infinite = np.bincount(inv, weights=inf_cell.astype(float), minlength=idx.size) > 0
    return idx, finite, infinite


def part_measure(space: MeasureSpace, w: IndexFn, n: int) -> XReal:
    return measure_of(space, preimage(space, w, n))
