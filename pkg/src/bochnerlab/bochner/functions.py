"""Vector-valued functions with declared regularity.

A ``VectorFn`` is a vectorized evaluator plus the data needed for honest
error bounds on ``[0, 1)``: a Lipschitz constant valid between the listed
breakpoints.  On finite spaces it is just a table of vectors.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from ..lebesgue import PiecewiseLipschitz, Tabulated
from ..spaces import FiniteSpace, MeasureSpace
from ..vectors import REAL, Vector, VSpace


class VectorFn:
    def __init__(self, space: MeasureSpace, evaluator: Callable, carrier: VSpace = REAL,
                 lipschitz: float = 0.0, breakpoints: Sequence[float] = (), name: str = ""):
        if lipschitz < 0 or not math.isfinite(lipschitz):
            raise ValueError("Lipschitz bound must be finite and >= 0")
        self.space = space
        self.evaluator = evaluator
        self.carrier = carrier
        self.lipschitz = float(lipschitz)
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints if 0.0 < b < 1.0))
        self.name = name

    def __call__(self, xs) -> np.ndarray:
        """Values at an array of points, shape ``(len(xs), d)``."""
        xs = np.asarray(xs)
        out = np.asarray(self.evaluator(xs), dtype=float).reshape(xs.size, self.carrier.d)
        if not np.all(np.isfinite(out)):
            raise ValueError(f"{self.name or 'function'} produced non-finite values")
        return out

    def at(self, x) -> Vector:
        return Vector(self.carrier, self(np.array([x]))[0])

    def __repr__(self):
        return f"VectorFn({self.name or self.evaluator!r}, {self.carrier!r}, L={self.lipschitz})"


def from_table(space: FiniteSpace, values, carrier: VSpace | None = None, name: str = "table") -> VectorFn:
    tab = np.array(values, dtype=float)
    if tab.ndim == 1:
        tab = tab[:, None]
    if tab.shape[0] != space.n_points:
        raise ValueError("need one value per atom")
    if carrier is None:
        from ..vectors import RVec
        carrier = REAL if tab.shape[1] == 1 else RVec(tab.shape[1])
    tab.flags.writeable = False
    return VectorFn(space, lambda xs: tab[np.asarray(xs, dtype=np.int64)], carrier, name=name)


def constant(space: MeasureSpace, v: Vector) -> VectorFn:
    c = v.coords.copy()
    return VectorFn(space, lambda xs: np.broadcast_to(c, (np.asarray(xs).size, c.size)),
                    v.space, 0.0, name=f"constant{c.tolist()}")


def scaled(a: float, f: VectorFn) -> VectorFn:
    a = float(a)
    return VectorFn(f.space, lambda xs: a * f(xs), f.carrier, abs(a) * f.lipschitz,
                    f.breakpoints, name=f"{a}*{f.name}")


def added(f: VectorFn, g: VectorFn) -> VectorFn:
    if f.space != g.space or f.carrier != g.carrier:
        raise ValueError("functions over different spaces or carriers")
    return VectorFn(f.space, lambda xs: f(xs) + g(xs), f.carrier, f.lipschitz + g.lipschitz,
                    f.breakpoints + g.breakpoints, name=f"({f.name}+{g.name})")


def norm_of(f: VectorFn) -> VectorFn:
    """``x -> |f(x)|`` as a real-valued VectorFn (the norm is 1-Lipschitz)."""
    return VectorFn(f.space, lambda xs: np.linalg.norm(f(xs), axis=1), REAL, f.lipschitz,
                    f.breakpoints, name=f"|{f.name}|")


def nonneg_of(f: VectorFn):
    """``|f|`` as a NonNegFn suitable for ``lint_p``."""
    if isinstance(f.space, FiniteSpace):
        return Tabulated(f.space, np.linalg.norm(f(np.arange(f.space.n_points)), axis=1))
    return PiecewiseLipschitz(f.space, lambda xs: np.linalg.norm(f(xs), axis=1),
                              f.lipschitz, f.breakpoints)
