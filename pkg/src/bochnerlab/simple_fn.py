"""Simple functions as an (index function, value table, bound) record.

A ``SimpleFn`` cuts the space into ``max_which + 1`` measurable parts with
``which`` and attaches a vector ``val[n]`` to each part.  The record axioms:

* ``val[max_which]`` is the zero vector, so the last part may carry infinite
  measure without spoiling integrability;
* ``which(x) <= max_which`` everywhere;
* every part is measurable (automatic for ``Table``/``StepFn``).

The representation is deliberately not canonical: several indices may carry
the same value and parts may be empty.  Sums use the product partition
``A_i & B_j`` indexed through ``pair_index``, so ``max_which`` of a sum is
``(n + 1)(m + 1) - 1``.  Value tables of sums are evaluated lazily so that
this index space never has to be stored.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .spaces import (
    FiniteSpace, MeasureSpace, MSet, SpaceMismatch, StepFn, Table, index_fn_from_json, pair_index,
    present_parts, refine, space_from_json, unpair_index,
)
from .vectors import REAL, CarrierMismatch, Vector, VSpace

# largest value table that is ever built explicitly
MATERIALIZE_LIMIT = 20_000_000


class RecordAxiomError(ValueError):
    """A simple-function record axiom is violated."""

    def __init__(self, message: str, axiom: str):
        super().__init__(message)
        self.axiom = axiom


# --------------------------------------------------------------------------
# value tables

class DenseValues:
    def __init__(self, array):
        arr = np.array(array, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if not np.all(np.isfinite(arr)):
            raise ValueError("simple function values must be finite")
        arr.flags.writeable = False
        self.array = arr

    @property
    def size(self) -> int:
        return self.array.shape[0]

    @property
    def dim(self) -> int:
        return self.array.shape[1]

    def take(self, idx) -> np.ndarray:
        return self.array[idx]

    def materialize(self) -> np.ndarray:
        return self.array


class ProductValues:
    """``val[pair_index(i, j, nB)] = left[i] + right[j]``, computed on demand."""

    def __init__(self, left, right):
        if left.dim != right.dim:
            raise CarrierMismatch("value tables of different dimension")
        self.left = left
        self.right = right
        self.nB = right.size - 1

    @property
    def size(self) -> int:
        return self.left.size * self.right.size

    @property
    def dim(self) -> int:
        return self.left.dim

    def take(self, idx) -> np.ndarray:
        i, j = unpair_index(np.asarray(idx, dtype=np.int64), self.nB)
        return self.left.take(i) + self.right.take(j)

    def materialize(self) -> np.ndarray:
        if self.size > MATERIALIZE_LIMIT:
            raise MemoryError(f"value table of size {self.size} is too large to build")
        return (self.left.materialize()[:, None, :]
                + self.right.materialize()[None, :, :]).reshape(self.size, self.dim)


class MappedValues:
    """Rowwise image of another table under ``fn`` (arrays in, arrays out)."""

    def __init__(self, base, fn: Callable[[np.ndarray], np.ndarray], dim: int):
        self.base = base
        self.fn = fn
        self._dim = dim

    @property
    def size(self) -> int:
        return self.base.size

    @property
    def dim(self) -> int:
        return self._dim

    def take(self, idx) -> np.ndarray:
        return self.fn(self.base.take(idx))

    def materialize(self) -> np.ndarray:
        return self.fn(self.base.materialize())


# --------------------------------------------------------------------------
# the record

class SimpleFn:
    """Validated simple-function record; immutable after construction."""

    def __init__(self, space: MeasureSpace, which, val, max_which: int, carrier: VSpace | None = None):
        # any object with size/dim/take/materialize is a value table
        if not all(hasattr(val, a) for a in ("size", "dim", "take", "materialize")):
            val = _values_from(val, carrier)
        if carrier is None:
            carrier = REAL if val.dim == 1 else _carrier_for_dim(val.dim)
        max_which = int(max_which)
        space.check_index_fn(which)
        if val.dim != carrier.d:
            raise RecordAxiomError(
                f"values have {val.dim} coordinates but carrier {carrier!r} needs {carrier.d}",
                "carrier")
        if max_which < 0 or val.size != max_which + 1:
            raise RecordAxiomError(
                f"length mismatch: val has {val.size} entries, max_which + 1 = {max_which + 1}",
                "length")
        if which.bound() > max_which:
            raise RecordAxiomError(
                f"index out of range: which takes {which.bound()} > max_which = {max_which}",
                "ax_which_max_which")
        last = val.take(np.array([max_which]))[0]
        if np.any(last):
            raise RecordAxiomError(
                f"last value not zero: val[{max_which}] = {last.tolist()}", "ax_val_max_which")
        self.space = space
        self.which = which
        self.val = val
        self.max_which = max_which
        self.carrier = carrier

    def __call__(self, x) -> Vector:
        return sf_eval(self, x)

    def __repr__(self):
        return f"SimpleFn({self.space!r}, {self.which!r}, max_which={self.max_which}, carrier={self.carrier!r})"

    def value_table(self) -> np.ndarray:
        return self.val.materialize()

    def cell_values(self) -> np.ndarray:
        """Value on every atom / step cell, shape ``(cells, d)``."""
        return self.val.take(self.which.cell_indices)

    def eval_many(self, xs) -> np.ndarray:
        return self.val.take(self.which(np.asarray(xs)))


def _carrier_for_dim(d: int) -> VSpace:
    from .vectors import RVec
    return RVec(d)


def _values_from(val, carrier: VSpace | None) -> DenseValues:
    if len(val) and isinstance(val[0], Vector):
        spaces = {v.space for v in val}
        if len(spaces) != 1:
            raise CarrierMismatch("values live in different carriers")
        (sp,) = spaces
        if carrier is not None and sp != carrier:
            raise CarrierMismatch(f"values in {sp!r}, carrier {carrier!r}")
        return DenseValues(np.stack([v.coords for v in val]))
    return DenseValues(val)


def _check_same(f: SimpleFn, g: SimpleFn):
    if f.space != g.space:
        raise SpaceMismatch("simple functions over different spaces")
    if f.carrier != g.carrier:
        raise CarrierMismatch(f"carrier mismatch: {f.carrier!r} vs {g.carrier!r}")


# --------------------------------------------------------------------------
# construction

def sf_new(space: MeasureSpace, which, val: Sequence, max_which: int, carrier: VSpace | None = None) -> SimpleFn:
    return SimpleFn(space, which, val, max_which, carrier)


def sf_zero(space: MeasureSpace, carrier: VSpace = REAL) -> SimpleFn:
    which = Table(np.zeros(space.n_points, dtype=np.int64)) if isinstance(space, FiniteSpace) \
        else StepFn([0.0, 1.0], [0])
    return SimpleFn(space, which, np.zeros((1, carrier.d)), 0, carrier)


def sf_eval(sf: SimpleFn, x) -> Vector:
    if not sf.space.contains(x):
        raise ValueError(f"point {x!r} outside {sf.space!r}")
    idx = int(sf.which(x))
    return Vector(sf.carrier, sf.val.take(np.array([idx]))[0])


def _which_from_set(space: MeasureSpace, s: MSet, inside: int, outside: int):
    space.check_set(s)
    if isinstance(space, FiniteSpace):
        idx = np.full(space.n_points, outside, dtype=np.int64)
        idx[list(s.indices)] = inside
        return Table(idx)
    br, ind, prev = [0.0], [], 0.0
    for a, b in s.intervals:
        if a > prev:
            br.append(a)
            ind.append(outside)
        br.append(b)
        ind.append(inside)
        prev = b
    if prev < 1.0:
        br.append(1.0)
        ind.append(outside)
    return StepFn(br, ind)


def sf_indicator(space: MeasureSpace, s: MSet, v: Vector) -> SimpleFn:
    """``v`` on ``s`` and zero elsewhere: index 0 on ``s``, 1 on the rest."""
    which = _which_from_set(space, s, 0, 1)
    return SimpleFn(space, which, [v, v.space.zero()], 1, v.space)


def _check_partition(space: MeasureSpace, parts: Sequence[MSet]):
    for p in parts:
        space.check_set(p)
    if isinstance(space, FiniteSpace):
        count = np.zeros(space.n_points, dtype=np.int64)
        for p in parts:
            count[list(p.indices)] += 1
        if np.any(count != 1):
            bad = int(np.flatnonzero(count != 1)[0])
            kind = "overlap" if count[bad] > 1 else "gap"
            raise ValueError(f"not a partition: {kind} at point {bad}")
        return
    ivs = sorted(iv for p in parts for iv in p.intervals)
    prev = 0.0
    for a, b in ivs:
        if a != prev:
            raise ValueError(f"not a partition: {'overlap' if a < prev else 'gap'} at {min(a, prev)}")
        prev = b
    if prev != 1.0:
        raise ValueError(f"not a partition: gap at {prev}")


def sf_from_partition(space: MeasureSpace, parts: Sequence[MSet], values: Sequence[Vector]) -> SimpleFn:
    """Simple function equal to ``values[i]`` on ``parts[i]``.

    A zero slot with empty preimage is appended when the last value is not
    already zero.
    """
    if len(parts) != len(values) or not parts:
        raise ValueError("need as many values as parts (at least one)")
    _check_partition(space, parts)
    carrier = values[0].space
    vals = list(values)
    if not vals[-1].is_zero():
        vals.append(carrier.zero())
    if isinstance(space, FiniteSpace):
        idx = np.zeros(space.n_points, dtype=np.int64)
        for i, p in enumerate(parts):
            idx[list(p.indices)] = i
        which = Table(idx)
    else:
        cells = sorted((a, b, i) for i, p in enumerate(parts) for a, b in p.intervals)
        which = StepFn([0.0] + [b for _, b, _ in cells], [i for _, _, i in cells])
    return SimpleFn(space, which, vals, len(vals) - 1, carrier)


# --------------------------------------------------------------------------
# algebra

def sf_plus(f: SimpleFn, g: SimpleFn) -> SimpleFn:
    _check_same(f, g)
    which = refine(f.which, g.which, g.max_which)
    max_which = (f.max_which + 1) * (g.max_which + 1) - 1
    assert pair_index(f.max_which, g.max_which, g.max_which) == max_which
    return SimpleFn(f.space, which, ProductValues(f.val, g.val), max_which, f.carrier)


def sf_scal(a: float, f: SimpleFn) -> SimpleFn:
    a = float(a)
    return SimpleFn(f.space, f.which, MappedValues(f.val, lambda v: a * v, f.val.dim), f.max_which, f.carrier)


def sf_neg(f: SimpleFn) -> SimpleFn:
    return sf_scal(-1.0, f)


def sf_minus(f: SimpleFn, g: SimpleFn) -> SimpleFn:
    return sf_plus(f, sf_neg(g))


def sf_norm(f: SimpleFn) -> SimpleFn:
    fn = lambda v: np.linalg.norm(v, axis=1)[:, None]
    return SimpleFn(f.space, f.which, MappedValues(f.val, fn, 1), f.max_which, REAL)


def sf_power(f: SimpleFn, p: float) -> SimpleFn:
    """``x -> x ** p`` on a nonnegative real-valued simple function."""
    p = float(p)
    if p <= 0:
        raise ValueError("power must be positive")
    if f.carrier != REAL:
        raise ValueError("sf_power needs a real-valued simple function")

    def fn(v):
        if np.any(v < 0):
            raise ValueError("sf_power domain error: negative value")
        return np.power(v, p)

    if f.val.size <= MATERIALIZE_LIMIT:
        fn(f.val.materialize())
    else:
        fn(f.cell_values())
    return SimpleFn(f.space, f.which, MappedValues(f.val, fn, 1), f.max_which, REAL)


def sf_remove_zeros(f: SimpleFn) -> SimpleFn:
    """Equivalent simple function with no zero value below ``max_which``.

    Zero-valued indices are deleted, the cells that carried them are sent to
    the last index, and the remaining indices are compacted in order.
    """
    table = f.val.materialize()
    nonzero = np.any(table[: f.max_which] != 0.0, axis=1)
    keep = np.flatnonzero(nonzero)
    new_max = keep.size
    remap = np.full(f.max_which + 1, new_max, dtype=np.int64)
    remap[keep] = np.arange(new_max)
    vals = np.vstack([table[keep], np.zeros((1, table.shape[1]))])
    if isinstance(f.which, Table):
        which = Table(remap[f.which.indices])
    else:
        which = StepFn(f.which.breaks, remap[f.which.indices])
    return SimpleFn(f.space, which, vals, new_max, f.carrier)


def integrable_sf(f: SimpleFn) -> bool:
    """Every part below ``max_which`` has finite measure."""
    idx, _, infinite = present_parts(f.space, f.which)
    return not np.any(infinite & (idx < f.max_which))


def nonintegrable_index(f: SimpleFn) -> int | None:
    """First index below ``max_which`` whose part has infinite measure."""
    idx, _, infinite = present_parts(f.space, f.which)
    bad = idx[infinite & (idx < f.max_which)]
    return int(bad[0]) if bad.size else None


# --------------------------------------------------------------------------
# serialization

def sf_to_json(f: SimpleFn) -> dict:
    return {
        "space": f.space.to_json(),
        "carrier": f.carrier.tag,
        "which": f.which.to_json(),
        "val": f.val.materialize().tolist(),
        "max_which": f.max_which,
    }


def sf_from_json(obj: dict, space: MeasureSpace | None = None) -> SimpleFn:
    if space is None:
        space = space_from_json(obj["space"])
    carrier = VSpace.from_tag(obj.get("carrier", "real"))
    return SimpleFn(space, index_fn_from_json(obj["which"]), obj["val"], obj["max_which"], carrier)
