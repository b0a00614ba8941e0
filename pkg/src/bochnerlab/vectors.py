"""Finite-dimensional real normed spaces and numeric limit utilities.

Three carriers are supported: the reals, ``R^d`` and the complex numbers
(stored as ``R^2`` with the Euclidean norm, which is the modulus).  All of
them are complete, so Cauchy sequences of integrals always have a limit.

The limit and Cauchy checks are finite-window surrogates: they inspect a
stated range of indices and say nothing beyond it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class CarrierMismatch(ValueError):
    pass


class ConvergenceError(RuntimeError):
    """No convergence detected within the inspected range."""

    def __init__(self, message: str, diameter: float = math.nan, last_index: int = -1):
        super().__init__(message)
        self.diameter = diameter
        self.last_index = last_index


@dataclass(frozen=True)
class VSpace:
    """Carrier descriptor: ``kind`` is ``"real"``, ``"rvec"`` or ``"complex"``."""

    kind: str
    d: int = 1

    def __post_init__(self):
        if self.kind == "real":
            object.__setattr__(self, "d", 1)
        elif self.kind == "complex":
            object.__setattr__(self, "d", 2)
        elif self.kind == "rvec":
            if int(self.d) < 1:
                raise ValueError("RVec dimension must be positive")
            object.__setattr__(self, "d", int(self.d))
        else:
            raise ValueError(f"unknown carrier kind {self.kind!r}")

    @property
    def dim(self) -> int:
        return self.d

    @property
    def tag(self) -> str:
        if self.kind == "rvec":
            return f"rvec{self.d}"
        return self.kind

    @classmethod
    def from_tag(cls, tag: str) -> VSpace:
        if tag == "real":
            return REAL
        if tag == "complex":
            return COMPLEX
        if tag.startswith("rvec"):
            return RVec(int(tag[4:]))
        raise ValueError(f"unknown carrier tag {tag!r}")

    def zero(self) -> Vector:
        return Vector(self, np.zeros(self.d))

    def vector(self, coords) -> Vector:
        return Vector(self, coords)

    def __repr__(self):
        return {"real": "Real", "complex": "Complex"}.get(self.kind, f"RVec({self.d})")


REAL = VSpace("real")
COMPLEX = VSpace("complex")


def RVec(d: int) -> VSpace:
    return VSpace("rvec", d)


class Vector:
    """An element of a carrier: the carrier plus a coordinate array."""

    __slots__ = ("space", "coords")

    def __init__(self, space: VSpace, coords):
        arr = np.array(coords, dtype=float).reshape(-1)
        if arr.shape[0] != space.d:
            raise CarrierMismatch(f"{space!r} expects {space.d} coordinates, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vector coordinates must be finite")
        arr.flags.writeable = False
        self.space = space
        self.coords = arr

    def __add__(self, other):
        return v_add(self, other)

    def __sub__(self, other):
        return v_add(self, v_neg(other))

    def __neg__(self):
        return v_neg(self)

    def __rmul__(self, a):
        return v_scal(a, self)

    def __eq__(self, other):
        return (isinstance(other, Vector) and self.space == other.space
                and np.array_equal(self.coords, other.coords))

    def __hash__(self):
        return hash((self.space, self.coords.tobytes()))

    def __repr__(self):
        return f"Vector({self.space!r}, {self.coords.tolist()})"

    def is_zero(self) -> bool:
        return not np.any(self.coords)

    def to_json(self):
        return {"carrier": self.space.tag, "coords": self.coords.tolist()}

    @classmethod
    def from_json(cls, obj) -> Vector:
        return cls(VSpace.from_tag(obj["carrier"]), obj["coords"])


def _same(u: Vector, v: Vector):
    if u.space != v.space:
        raise CarrierMismatch(f"carrier mismatch: {u.space!r} vs {v.space!r}")


def v_zero(space: VSpace) -> Vector:
    return space.zero()


def v_add(u: Vector, v: Vector) -> Vector:
    _same(u, v)
    return Vector(u.space, u.coords + v.coords)


def v_neg(u: Vector) -> Vector:
    return Vector(u.space, -u.coords)


def v_scal(a: float, u: Vector) -> Vector:
    return Vector(u.space, float(a) * u.coords)


def v_norm(u: Vector) -> float:
    return float(np.linalg.norm(u.coords))


def v_dist(u: Vector, v: Vector) -> float:
    _same(u, v)
    return float(np.linalg.norm(u.coords - v.coords))


Sequence_ = Callable[[int], Vector]


def seq_limit_check(u: Sequence_, l: Vector, eps: float, N: int, window: int = 100) -> bool:
    """True iff ``|u(n) - l| < eps`` for every ``n`` in ``[N, N + window]``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return all(v_dist(u(n), l) < eps for n in range(N, N + window + 1))


def _distances(values: Sequence[Vector]) -> np.ndarray:
    pts = np.stack([v.coords for v in values])
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt((diff ** 2).sum(-1))


def _diameter(values: Sequence[Vector]) -> float:
    return float(_distances(values).max())


def cauchy_check(u: Sequence_, eps: float, n0: int, window: int = 100) -> bool:
    """True iff all pairs ``p, q`` in ``[n0, n0 + window]`` are closer than eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if window < 1:
        raise ValueError("window must be >= 1")
    return _diameter([u(n) for n in range(n0, n0 + window + 1)]) < eps


def seq_limit_estimate(u: Sequence_, eps: float, max_n: int, window: int = 100) -> Vector:
    """First term ``u(n*)`` whose Cauchy window of width ``window`` closes.

    Raises ConvergenceError (carrying the last oscillation diameter) when no
    ``n* <= max_n`` qualifies.
    """
    return seq_limit_index(u, eps, max_n, window)[1]


def seq_limit_index(u: Sequence_, eps: float, max_n: int, window: int = 100) -> tuple[int, Vector]:
    """Like :func:`seq_limit_estimate` but also returns ``n*``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    cache: dict[int, Vector] = {}

    def get(n):
        if n not in cache:
            cache[n] = u(n)
        return cache[n]

    diam = math.nan
    n0 = 0
    while n0 <= max_n:
        window_vals = [get(n) for n in range(n0, n0 + window + 1)]
        dist = _distances(window_vals)
        diam = float(dist.max())
        if diam < eps:
            return n0, window_vals[0]
        # every window that still contains the latest-starting bad pair fails too
        p, q = np.nonzero(np.triu(dist >= eps, k=1))
        skip = int(p.max()) + 1
        for n in range(n0, n0 + skip):
            cache.pop(n, None)
        n0 += skip
    raise ConvergenceError(
        f"no convergence detected up to n={max_n} (last oscillation diameter {diam:.3g})",
        diameter=diam, last_index=max_n)
