"""Integral of nonnegative functions, computed at desk scale.

On a finite space the supremum over simple minorants is attained by the
function itself, so the integral is an exact weighted sum.  On ``[0, 1)``
the minorant used is the dyadic truncation

    psi_d(x) = min(floor(2^d * m(x)) / 2^d, d)

of a certified lower bound ``m`` of the function on each cell of the dyadic
grid of depth ``d`` (refined with the function's breakpoints).  The result
comes with a certified error bound and is nondecreasing in ``d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .extreal import INF, ZERO, XReal
from .simple_fn import SimpleFn
from .spaces import MIN_CELL, FiniteSpace, MeasureSpace, present_parts
from .vectors import REAL


class DomainError(ValueError):
    pass


# --------------------------------------------------------------------------
# nonnegative functions

class NonNegFn:
    """Base class; subclasses evaluate arrays of points to arrays of reals >= 0."""

    space: MeasureSpace

    def __call__(self, xs) -> np.ndarray:
        raise NotImplementedError


class SimpleNN(NonNegFn):
    """A real-valued simple function with nonnegative values."""

    def __init__(self, sf: SimpleFn):
        if sf.carrier != REAL:
            raise DomainError("SimpleNN needs a real-valued simple function")
        if np.any(sf.cell_values() < 0):
            raise DomainError("SimpleNN needs nonnegative values")
        self.sf = sf
        self.space = sf.space

    def __call__(self, xs):
        return self.sf.eval_many(xs)[:, 0]


class Tabulated(NonNegFn):
    """One value per atom of a finite space."""

    def __init__(self, space: FiniteSpace, values):
        vals = np.asarray(values, dtype=float).reshape(-1)
        if not isinstance(space, FiniteSpace) or vals.size != space.n_points:
            raise ValueError("Tabulated needs one value per atom of a FiniteSpace")
        if np.any(~np.isfinite(vals)) or np.any(vals < 0):
            raise DomainError("Tabulated values must be finite and >= 0")
        vals.flags.writeable = False
        self.space = space
        self.values = vals

    def __call__(self, xs):
        return self.values[np.asarray(xs, dtype=np.int64)]


class PiecewiseLipschitz(NonNegFn):
    """Vectorized evaluator, Lipschitz with constant ``lipschitz`` between breakpoints.

    On a finite space the regularity data is ignored.
    """

    def __init__(self, space: MeasureSpace, evaluator: Callable, lipschitz: float = 0.0,
                 breakpoints: Sequence[float] = ()):
        if lipschitz < 0 or not math.isfinite(lipschitz):
            raise ValueError("Lipschitz bound must be finite and >= 0")
        self.space = space
        self.evaluator = evaluator
        self.lipschitz = float(lipschitz)
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints if 0.0 < b < 1.0))

    def __call__(self, xs):
        out = np.asarray(self.evaluator(np.asarray(xs)), dtype=float).reshape(-1)
        if np.any(~np.isfinite(out)) or np.any(out < 0):
            raise DomainError("evaluator produced a negative or non-finite value")
        return out


# --------------------------------------------------------------------------
# integrals

@dataclass(frozen=True)
class LIntResult:
    value: XReal
    error_bound: float = 0.0
    overflow: bool = False
    depth: int | None = None

    def upper(self) -> float:
        return self.value.value + self.error_bound


def _weighted_sum(masses: np.ndarray, values: np.ndarray) -> LIntResult:
    """Sum of ``mass * value`` with ``inf * 0 = 0`` and ``inf * positive = inf``."""
    inf_mass = np.isinf(masses)
    if np.any(inf_mass & (values > 0)):
        return LIntResult(INF)
    with np.errstate(over="ignore"):
        prods = np.where(inf_mass, 0.0, masses) * values
        total = math.fsum(prods) if np.all(np.isfinite(prods)) else math.inf
    if not math.isfinite(total):
        return LIntResult(INF, overflow=True)
    return LIntResult(XReal(total))


def lint_p_simple(f: SimpleFn | SimpleNN) -> XReal:
    """Exact integral of a nonnegative real simple function."""
    sf = f.sf if isinstance(f, SimpleNN) else f
    if sf.carrier != REAL:
        raise DomainError("lint_p_simple needs a real-valued simple function")
    idx, finite, infinite = present_parts(sf.space, sf.which)
    vals = sf.val.take(idx)[:, 0]
    if np.any(vals < 0):
        raise DomainError("lint_p_simple: negative value")
    masses = np.where(infinite, math.inf, finite)
    return _weighted_sum(masses, vals).value


def dyadic_grid(depth: int, breakpoints: Sequence[float] = ()) -> np.ndarray:
    """Dyadic grid of depth ``depth`` on [0, 1] refined with ``breakpoints``.

    Breakpoints closer than MIN_CELL to an existing grid point are dropped.
    """
    grid = np.linspace(0.0, 1.0, 2 ** depth + 1)
    extra = [b for b in breakpoints if 0.0 < b < 1.0]
    if not extra:
        return grid
    out = np.union1d(grid, extra)
    keep = np.concatenate([[True], np.diff(out) >= MIN_CELL])
    keep[-1] = True
    out = out[keep]
    if out[-1] - out[-2] < MIN_CELL:
        out = np.delete(out, -2)
    return out


def _lint_interval(f: NonNegFn, depth: int) -> LIntResult:
    if isinstance(f, SimpleNN):
        return LIntResult(lint_p_simple(f), 0.0, depth=depth)
    if not isinstance(f, PiecewiseLipschitz):
        raise TypeError("on IntervalSpace lint_p needs a SimpleNN or PiecewiseLipschitz function")
    br = dyadic_grid(depth, f.breakpoints)
    h = np.diff(br)
    mid = 0.5 * (br[:-1] + br[1:])
    fm = f(mid)
    slack = 0.5 * f.lipschitz * h
    lower = np.maximum(fm - slack, 0.0)
    scale = 2.0 ** depth
    psi = np.minimum(np.floor(scale * lower) / scale, float(depth))
    value = float(np.sum(h * psi))
    upper = float(np.sum(h * (fm + slack)))
    if not (math.isfinite(value) and math.isfinite(upper)):
        return LIntResult(INF, overflow=True, depth=depth)
    return LIntResult(XReal(value), max(upper - value, 0.0), depth=depth)


def lint_p(space: MeasureSpace, f: NonNegFn, depth: int = 12) -> LIntResult:
    """Integral of ``f`` with a certified error bound (0 where exact)."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if f.space != space:
        raise ValueError("function lives on a different space")
    if isinstance(space, FiniteSpace):
        if isinstance(f, SimpleNN):
            return LIntResult(lint_p_simple(f), depth=depth)
        return _weighted_sum(space.mass_array, f(np.arange(space.n_points)))
    return _lint_interval(f, depth)


def markov_fraction(space: MeasureSpace, f: NonNegFn, t: float, depth: int = 12) -> XReal:
    """Measure of ``{x : f(x) >= t}``.

    Exact on finite spaces and for simple functions; on ``[0, 1)`` the
    measure of the grid cells certified to lie inside the level set (an
    inner approximation).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if isinstance(space, FiniteSpace):
        vals = f(np.arange(space.n_points))
        sel = vals >= t
        if np.any(np.isinf(space.mass_array[sel])):
            return INF
        return XReal(math.fsum(space.mass_array[sel]))
    if isinstance(f, SimpleNN):
        sf = f.sf
        cells = sf.cell_values()[:, 0] >= t
        return XReal(math.fsum(np.diff(sf.which.breaks)[cells]))
    br = dyadic_grid(depth, f.breakpoints)
    h = np.diff(br)
    mid = 0.5 * (br[:-1] + br[1:])
    inside = f(mid) - 0.5 * f.lipschitz * h >= t
    return XReal(math.fsum(h[inside])) if np.any(inside) else ZERO
