"""Executable checks of the main integral theorems.

* ``bint_vs_lintp``: for nonnegative real integrable ``f`` the Bochner
  integral agrees with ``lint_p``;
* ``zero_ae_check``: ``lint_p(|f|) = 0`` iff ``f = 0`` almost everywhere;
* ``dominated_convergence_run``: integrals of a dominated, pointwise
  convergent family converge to the integral of the limit.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..lebesgue import NonNegFn, _weighted_sum, dyadic_grid, lint_p
from ..separability import DenseSeq, dense_seq
from ..spaces import FiniteSpace, MeasureSpace
from ..vectors import REAL, ConvergenceError
from .functions import VectorFn, nonneg_of
from .witness import (
    BIntResult, bif_from_separable, bint_detail, default_probes,
)


@dataclass
class BIntParams:
    n_max: int = 1 << 20
    resolution: int = 12
    eps: float = 1e-3
    window: int = 100
    l1_tol: float | None = None
    depth: int = 12


@dataclass
class BIntVsLIntReport:
    bint: float
    lint: float
    lint_bound: float
    bint_bound: float
    diff: float
    tolerance: float
    exact: bool
    passed: bool

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return asdict(self)


def bint_vs_lintp(space: MeasureSpace, f: VectorFn, params: BIntParams | None = None) -> BIntVsLIntReport:
    """Compare ``bint(bif_real(f))`` with ``lint_p(f)`` for ``f >= 0``.

    Exact equality is demanded on finite spaces; on ``[0, 1)`` the
    tolerance is the sum of both certified bounds.
    """
    p = params or BIntParams()
    if f.carrier != REAL:
        raise ValueError("bint_vs_lintp needs a real-valued function")
    finite = isinstance(space, FiniteSpace)
    pts = np.arange(space.n_points) if finite else default_probes(space)
    if np.any(f(pts) < 0):
        raise ValueError("bint_vs_lintp needs a nonnegative function")
    lint = lint_p(space, nonneg_of(f), p.depth)
    w = bif_from_separable(space, f, dense_seq(REAL, True), p.n_max, p.resolution)
    b = bint_detail(w, p.eps, p.window, p.l1_tol)
    bv = float(b.value.coords[0])
    lv = lint.value.value
    diff = abs(bv - lv)
    tol = 0.0 if finite else b.l1_upper + lint.error_bound
    return BIntVsLIntReport(bv, lv, lint.error_bound, b.l1_upper, diff, tol, finite, diff <= tol)


@dataclass
class ZeroAEReport:
    zero_ae: bool
    lint: float
    lint_bound: float
    nonzero_measure: float
    exact: bool
    agrees: bool

    def __bool__(self):
        return self.zero_ae

    def to_json(self) -> dict:
        return asdict(self)


def zero_ae_check(space: MeasureSpace, f: VectorFn, depth: int = 12) -> ZeroAEReport:
    """Decide whether ``f`` vanishes almost everywhere.

    On a finite space the decision is exact and both sides of the
    equivalence are computed independently (``agrees`` records that they
    match).  On ``[0, 1)`` the certified bound on ``lint_p(|f|)`` and the
    measure of grid cells whose midpoint value is nonzero are reported.
    """
    if isinstance(space, FiniteSpace):
        vals = f(np.arange(space.n_points))
        masses = space.mass_array
        lint = _weighted_sum(masses, np.sqrt((vals * vals).sum(1)))
        nonzero = (vals != 0.0).any(1)
        hit = masses[nonzero]
        measure = math.inf if np.isinf(hit).any() else math.fsum(hit)
        by_atoms = not (nonzero & (masses > 0)).any()
        by_lint = lint.value.value == 0.0
        return ZeroAEReport(by_atoms, lint.value.value, 0.0, measure, True, by_atoms == by_lint)
    lint = lint_p(space, nonneg_of(f), depth)
    br = dyadic_grid(depth, f.breakpoints)
    mid = 0.5 * (br[:-1] + br[1:])
    nonzero = np.any(f(mid) != 0.0, axis=1)
    measure = math.fsum(np.diff(br)[nonzero])
    zero = measure == 0.0
    return ZeroAEReport(zero, lint.value.value, lint.error_bound, measure, False,
                        zero == (lint.value.value == 0.0))


# --------------------------------------------------------------------------
# dominated convergence

class DominationError(ValueError):
    pass


@dataclass
class DCTParams:
    n_values: Sequence[int] = (0, 1, 2, 5, 10, 20, 50, 100, 200)
    eps: float = 5e-3
    bint_eps: float = 1e-3
    window: int = 100
    resolution: int = 12
    n_max: int = 1 << 21
    l1_tol: float | None = None
    n_probes: int = 1000
    seed: int = 0
    # pointwise-limit estimation when no limit is supplied
    limit_eps: float = 1e-6
    limit_max_n: int = 100_000
    limit_window: int = 100
    limit_lipschitz: float | None = None


@dataclass
class DCTRow:
    n: int
    value: list
    diff: float
    l1_upper: float
    n_star: int


@dataclass
class DCTReport:
    rows: list[DCTRow]
    limit_value: list
    limit_l1_upper: float
    g_integral: float
    eps: float
    passed: bool
    params: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return asdict(self)


def pointwise_limit(f_seq: Callable[[int], VectorFn], eps: float, max_n: int, window: int = 100,
                    lipschitz: float | None = None) -> VectorFn:
    """Limit evaluator estimated pointwise by Cauchy stabilization.

    At each point the first window ``[n0, n0 + window]`` with
    ``2 max_k |f_k(x) - f_n0(x)| < eps`` (which bounds its diameter) is
    found, with ``n0`` doubling between attempts; its first term is the
    estimate.  Raises ConvergenceError past ``max_n``.
    """
    f0 = f_seq(0)
    cache: dict = {}

    def evaluate(xs):
        xs = np.asarray(xs)
        key = xs.tobytes()
        if key in cache:
            return cache[key]
        out = np.zeros((xs.size, f0.carrier.d))
        todo = np.ones(xs.size, dtype=bool)
        n0 = 0
        while np.any(todo):
            if n0 > max_n:
                raise ConvergenceError(f"no convergence detected at {int(todo.sum())} points by n={max_n}",
                                       last_index=max_n)
            sel = np.flatnonzero(todo)
            first = f_seq(n0)(xs[sel])
            spread = np.zeros(sel.size)
            for n in range(n0 + 1, n0 + window + 1):
                spread = np.maximum(spread, np.linalg.norm(f_seq(n)(xs[sel]) - first, axis=1))
            ok = 2.0 * spread < eps
            out[sel[ok]] = first[ok]
            todo[sel[ok]] = False
            n0 = max(2 * n0, n0 + window)
        if len(cache) < 16:
            cache[key] = out
        return out

    L = f0.lipschitz if lipschitz is None else lipschitz
    return VectorFn(f0.space, evaluate, f0.carrier, L, f0.breakpoints, name="pointwise-limit")


def dominated_convergence_run(space: MeasureSpace, f_seq: Callable[[int], VectorFn], g: NonNegFn,
                              params: DCTParams | None = None, limit: VectorFn | None = None,
                              u: DenseSeq | None = None) -> DCTReport:
    """Integrals of ``f_n`` against the integral of their pointwise limit."""
    p = params or DCTParams()
    if not p.n_values:
        raise ValueError("n_values must be nonempty")
    g_int = lint_p(space, g, p.resolution)
    if not g_int.value.is_finite:
        raise ValueError("dominating function not integrable")
    probes = default_probes(space, p.n_probes, p.seed)
    gx = g(probes)
    fns = {}
    for n in p.n_values:
        fn = f_seq(n)
        excess = np.linalg.norm(fn(probes), axis=1) - gx
        bad = np.flatnonzero(excess > 1e-12)
        if bad.size:
            raise DominationError(f"domination violated at (n={n}, x={probes[bad[0]].item()})")
        fns[n] = fn
    carrier = fns[p.n_values[0]].carrier
    u = u or dense_seq(carrier, True)
    if limit is None:
        limit = pointwise_limit(f_seq, p.limit_eps, p.limit_max_n, p.limit_window, p.limit_lipschitz)
        if isinstance(space, FiniteSpace):
            # tabulate once so the witness does not re-run the estimate
            from .functions import from_table
            limit = from_table(space, limit(np.arange(space.n_points)), carrier, "pointwise-limit")

    def integrate(fn: VectorFn) -> BIntResult:
        w = bif_from_separable(space, fn, u, p.n_max, p.resolution, probes=probes)
        return bint_detail(w, p.bint_eps, p.window, p.l1_tol)

    ref = integrate(limit)
    rows = []
    for n in p.n_values:
        r = integrate(fns[n])
        diff = float(np.linalg.norm(r.value.coords - ref.value.coords))
        rows.append(DCTRow(n, r.value.coords.tolist(), diff, r.l1_upper, r.n_star))
    passed = rows[-1].diff < p.eps
    return DCTReport(rows, ref.value.coords.tolist(), ref.l1_upper, g_int.value.value, p.eps, passed,
                     {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(p).items()})
