"""Dense sequences built from an enumeration of the rationals.

Enumeration order of ``enum_rationals`` (fixed, so runs are reproducible):
index 0 is ``0``; then diagonals ``s = |num| + den = 2, 3, ...``; inside a
diagonal ``num`` runs from 1 up to ``s - 1`` and each reduced ``num/den`` is
followed by its negative.  Non-reduced pairs are skipped::

    0, 1, -1, 1/2, -1/2, 2, -2, 1/3, -1/3, 3, -3, 1/4, -1/4, 2/3, ...

Tuples of rationals (``R^d``, complex) are obtained by iterated pairing of
indices; both supported pairings map index 0 to ``(0, ..., 0)``, so the
zero vector always comes first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .vectors import REAL, Vector, VSpace

# --------------------------------------------------------------------------
# rational enumeration

_NUM = np.zeros(1, dtype=np.int64)
_DEN = np.ones(1, dtype=np.int64)
_NEXT_DIAGONAL = 2


def _extend(count: int):
    global _NUM, _DEN, _NEXT_DIAGONAL
    nums, dens = [_NUM], [_DEN]
    size = _NUM.size
    s = _NEXT_DIAGONAL
    while size < count:
        p = np.arange(1, s, dtype=np.int64)
        q = s - p
        keep = np.gcd(p, q) == 1
        p, q = p[keep], q[keep]
        signed = np.empty(2 * p.size, dtype=np.int64)
        signed[0::2] = p
        signed[1::2] = -p
        nums.append(signed)
        dens.append(np.repeat(q, 2))
        size += signed.size
        s += 1
    _NUM = np.concatenate(nums)
    _DEN = np.concatenate(dens)
    _NEXT_DIAGONAL = s


def rationals_prefix(count: int) -> tuple[np.ndarray, np.ndarray]:
    """Numerators and denominators of the first ``count`` rationals."""
    if count > _NUM.size:
        _extend(count)
    return _NUM[:count], _DEN[:count]


def rational_values(count: int) -> np.ndarray:
    num, den = rationals_prefix(count)
    return num / den


def enum_rationals(n: int) -> Fraction:
    if n < 0:
        raise ValueError("index must be >= 0")
    num, den = rationals_prefix(n + 1)
    return Fraction(int(num[n]), int(den[n]))


def rational_index(q: Fraction) -> int:
    """Position of ``q`` in the enumeration (inverse of ``enum_rationals``)."""
    q = Fraction(q)
    if q == 0:
        return 0
    s = abs(q.numerator) + q.denominator
    # everything up to and including diagonal s
    while _NEXT_DIAGONAL <= s:
        _extend(_NUM.size + 1)
    hits = np.flatnonzero((_NUM == q.numerator) & (_DEN == q.denominator))
    return int(hits[0])


# --------------------------------------------------------------------------
# pairings of N x N -> N (inverse direction)

def cantor_unpair(n):
    n = np.asarray(n, dtype=np.int64)
    w = np.floor((np.sqrt(8.0 * n + 1.0) - 1.0) / 2.0).astype(np.int64)
    # fix floating rounding of the square root
    w = np.where(w * (w + 1) // 2 > n, w - 1, w)
    w = np.where((w + 1) * (w + 2) // 2 <= n, w + 1, w)
    j = n - w * (w + 1) // 2
    return w - j, j


def szudzik_unpair(n):
    n = np.asarray(n, dtype=np.int64)
    r = np.floor(np.sqrt(n.astype(float))).astype(np.int64)
    r = np.where(r * r > n, r - 1, r)
    r = np.where((r + 1) * (r + 1) <= n, r + 1, r)
    d = n - r * r
    return np.where(d < r, d, r), np.where(d < r, r, d - r)


PAIRINGS = {"cantor": cantor_unpair, "szudzik": szudzik_unpair}


def tuple_indices(n, d: int, pairing: str = "cantor") -> np.ndarray:
    """Indices ``(i_1, ..., i_d)`` for each ``n`` by iterated unpairing."""
    unpair = PAIRINGS[pairing]
    n = np.asarray(n, dtype=np.int64)
    cols = []
    rest = n
    for _ in range(d - 1):
        i, rest = unpair(rest)
        cols.append(i)
    cols.append(rest)
    return np.stack(cols, axis=-1)


# --------------------------------------------------------------------------
# dense sequences

@dataclass(frozen=True)
class DenseSeq:
    """Sequence ``n -> u(n)`` in a carrier.

    ``generator`` maps an index array to an array of shape ``(len, d)``.
    """

    carrier: VSpace
    generator: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    zero_first: bool = True
    name: str = "custom"

    def __call__(self, n: int) -> Vector:
        return Vector(self.carrier, self.generator(np.array([n]))[0])

    def prefix(self, count: int) -> np.ndarray:
        return self.generator(np.arange(count, dtype=np.int64))


def _rational_tuples(d: int, pairing: str, shift: int):
    def gen(n):
        idx = tuple_indices(np.asarray(n, dtype=np.int64) + shift, d, pairing)
        vals = rational_values(int(idx.max()) + 1 if idx.size else 1)
        return vals[idx]
    return gen


def dense_seq(carrier: VSpace = REAL, zero_first: bool = True, pairing: str = "cantor") -> DenseSeq:
    """Rational (tuple) dense sequence in ``carrier``.

    With ``zero_first=False`` the sequence is shifted by one so that its
    first element is not the zero vector.
    """
    if pairing not in PAIRINGS:
        raise ValueError(f"unknown pairing {pairing!r}")
    shift = 0 if zero_first else 1
    return DenseSeq(carrier, _rational_tuples(carrier.d, pairing, shift), zero_first,
                    f"rational-{pairing}")


def _dyadic_levels(d: int):
    """Yield (level, side, step, box) with side = points per axis."""
    level = 1
    while True:
        step = 2.0 ** -level
        side = 2 * level * 2 ** level + 1
        yield level, side, step, float(level)
        level += 1


def dyadic_seq(carrier: VSpace = REAL) -> DenseSeq:
    """Zero first, then for L = 1, 2, ... the grid ``2^-L Z^d`` inside ``[-L, L]^d``.

    Points repeat across levels; density does not need injectivity.
    """
    d = carrier.d

    def gen(n):
        n = np.asarray(n, dtype=np.int64)
        out = np.zeros((n.size, d))
        rest = n - 1
        todo = rest >= 0
        for level, side, step, box in _dyadic_levels(d):
            if not np.any(todo):
                break
            size = side ** d
            here = todo & (rest < size)
            if np.any(here):
                coords = np.stack(np.unravel_index(rest[here], (side,) * d), axis=-1)
                out[here] = coords * step - box
            rest = np.where(todo, rest - size, rest)
            todo = todo & ~here
        return out

    return DenseSeq(carrier, gen, True, "dyadic")


# --------------------------------------------------------------------------
# weak separability

@dataclass
class SepReport:
    ok: bool
    worst_index: int
    first_hits: np.ndarray
    eps: float
    max_n: int


def weak_sep_check(u: DenseSeq, samples, eps: float, max_n: int, chunk: int = 1 << 16) -> SepReport:
    """For each sample, the first ``n <= max_n`` with ``|y - u(n)| < eps``.

    ``first_hits`` holds -1 where none was found; ``worst_index`` is the
    largest first hit (or -1 if some sample was never hit).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    ys = np.array([s.coords if isinstance(s, Vector) else np.atleast_1d(s) for s in samples], dtype=float)
    ys = ys.reshape(len(ys), u.carrier.d)
    hits = np.full(len(ys), -1, dtype=np.int64)
    eps2 = eps * eps
    start = 0
    while start <= max_n and np.any(hits < 0):
        stop = min(start + chunk, max_n + 1)
        pts = u.generator(np.arange(start, stop, dtype=np.int64))
        open_ = np.flatnonzero(hits < 0)
        for lo in range(0, open_.size, 256):
            sel = open_[lo:lo + 256]
            d2 = ((ys[sel, None, :] - pts[None, :, :]) ** 2).sum(-1)
            close = d2 < eps2
            found = close.any(axis=1)
            hits[sel[found]] = start + close[found].argmax(axis=1)
        start = stop
    ok = bool(np.all(hits >= 0))
    worst = int(hits.max()) if ok and hits.size else -1
    return SepReport(ok, worst, hits, eps, max_n)
