"""Approximating simple functions from a zero-first dense sequence.

``s_n(x) = u(j*)`` where ``j*`` is the smallest index in ``0..n`` minimizing
``|f(x) - u(j)|``.  Because ``u(0) = 0`` always competes,

* ``|f(x) - s_n(x)| <= |f(x)|`` (domination),
* a part carrying ``u(j) != 0`` lies inside ``{|f| >= |u(j)|/2}``, which has
  finite measure when ``|f|`` is integrable (Markov), so every ``s_n`` is an
  integrable simple function,
* ``s_n(x) -> f(x)`` whenever the sequence is dense around ``f(x)``.

Index layout of ``s_n``: ``val[k] = u(k + 1)`` for ``k < n`` and
``val[n] = u(0) = 0``, so the zero vector sits in the last slot.

On ``[0, 1)`` the function is sampled at the midpoints of a uniform grid of
``2^resolution`` cells (refined with the function's breakpoints).  A
nonzero candidate is only admitted on a cell when the Lipschitz bound
certifies ``|f(x) - u| <= |f(x)|`` on the whole cell, which keeps the
domination property exact everywhere.  The measure of cells whose choice is
not certified optimal over the whole cell is reported as
``misclassified``.

All indices ``n`` are handled by one incremental pass that logs every
change of choice ("record"); any ``s_n`` and its integral are rebuilt from
the log.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..lebesgue import PiecewiseLipschitz, Tabulated, dyadic_grid, lint_p
from ..separability import DenseSeq
from ..simple_fn import SimpleFn
from ..spaces import FiniteSpace, MeasureSpace, StepFn, Table
from .functions import VectorFn

_BLOCK = 64
_CHUNK = 8192


class PrefixValues:
    """Value table ``[u(1), ..., u(n), u(0)]`` viewed over a dense-sequence prefix."""

    def __init__(self, U: np.ndarray, n: int):
        self.U = U
        self.n = n

    @property
    def size(self) -> int:
        return self.n + 1

    @property
    def dim(self) -> int:
        return self.U.shape[1]

    def take(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return self.U[np.where(idx < self.n, idx + 1, 0)]

    def materialize(self) -> np.ndarray:
        return np.vstack([self.U[1:self.n + 1], self.U[:1]])


@dataclass
class Checkpoint:
    n: int
    misclassified: float


class TeschlEngine:
    """Incremental computation of ``s_0, ..., s_{n_max}`` for one function."""

    def __init__(self, space: MeasureSpace, f: VectorFn, u: DenseSeq, n_max: int,
                 resolution: int = 12, checkpoints=()):
        if not u.zero_first:
            raise ValueError("the approximation needs a zero-first dense sequence")
        if u.carrier != f.carrier:
            raise ValueError(f"dense sequence in {u.carrier!r}, function in {f.carrier!r}")
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        self.space = space
        self.f = f
        self.u = u
        self.n_max = int(n_max)
        self.resolution = int(resolution)

        if isinstance(space, FiniteSpace):
            self.breaks = None
            self.points = np.arange(space.n_points)
            self.measure = space.mass_array
            self.slack = np.zeros(space.n_points)
        else:
            self.breaks = dyadic_grid(self.resolution, f.breakpoints)
            h = np.diff(self.breaks)
            self.points = 0.5 * (self.breaks[:-1] + self.breaks[1:])
            self.measure = h
            # |dist(x) - dist(mid)| <= L h / 2 inside a cell
            self.slack = f.lipschitz * h
        self.F = f(self.points)
        self.U = u.prefix(self.n_max + 1)
        if np.any(self.U[0] != 0.0):
            raise ValueError("dense sequence does not start with the zero vector")
        cps = sorted({int(c) for c in checkpoints if 0 <= c <= self.n_max} | {self.n_max})
        self.checkpoints: list[Checkpoint] = []
        self._run(cps)

    # ------------------------------------------------------------------
    def _run(self, cps):
        F, U = self.F, self.U
        nc = F.shape[0]
        best = (F ** 2).sum(1)            # squared distance to the current choice
        second = np.full(nc, np.inf)      # second smallest admissible squared distance
        rec_n, rec_c = [], []
        blocks = [np.arange(s, min(s + _BLOCK, nc)) for s in range(0, nc, _BLOCK)]
        blo = np.array([F[b].min(0) for b in blocks])
        bhi = np.array([F[b].max(0) for b in blocks])
        glo, ghi = F.min(0), F.max(0)
        certified_fallback = np.all(self.slack == 0.0)

        start = 1
        for cp in cps:
            while start <= cp:
                stop = min(start + _CHUNK, cp + 1)
                Ub = U[start:stop]
                idx = np.arange(start, stop)
                gap = np.maximum(np.maximum(glo - Ub, Ub - ghi), 0.0)
                keep = (gap ** 2).sum(1) < second.max() if not np.isinf(second.max()) else np.ones(len(Ub), bool)
                Ub, idx = Ub[keep], idx[keep]
                if Ub.shape[0]:
                    for bi, cells in enumerate(blocks):
                        thresh = second[cells].max()
                        g = np.maximum(np.maximum(blo[bi] - Ub, Ub - bhi[bi]), 0.0)
                        cand = (g ** 2).sum(1) < thresh if np.isfinite(thresh) else np.ones(len(Ub), bool)
                        if not cand.any():
                            continue
                        Uk, ik = Ub[cand], idx[cand]
                        Fb = F[cells]
                        D = ((Fb[:, None, :] - Uk[None, :, :]) ** 2).sum(-1)
                        if not certified_fallback:
                            unorm = np.sqrt((Uk ** 2).sum(1))
                            margin = 2.0 * Fb @ Uk.T - (unorm ** 2)[None, :]
                            D = np.where(margin >= unorm[None, :] * self.slack[cells][:, None], D, np.inf)
                        prev = best[cells]
                        run = np.minimum.accumulate(np.concatenate([prev[:, None], D], axis=1), axis=1)
                        is_rec = D < run[:, :-1]
                        rc, rk = np.nonzero(is_rec)
                        if rc.size:
                            rec_c.append(cells[rc])
                            rec_n.append(ik[rk])
                        allv = np.concatenate([prev[:, None], second[cells][:, None], D], axis=1)
                        two = np.partition(allv, 1, axis=1)[:, :2]
                        best[cells] = two[:, 0]
                        second[cells] = two[:, 1]
                start = stop
            self.checkpoints.append(Checkpoint(cp, self._misclassified(best, second)))

        if rec_n:
            n_arr = np.concatenate(rec_n)
            c_arr = np.concatenate(rec_c)
        else:
            n_arr = np.zeros(0, dtype=np.int64)
            c_arr = np.zeros(0, dtype=np.int64)
        order = np.lexsort((c_arr, n_arr))
        self.rec_n = n_arr[order]
        self.rec_c = c_arr[order]
        self._integral_log()

    def _misclassified(self, best, second) -> float:
        if isinstance(self.space, FiniteSpace):
            return 0.0
        gap = np.sqrt(second) - np.sqrt(best)
        return float(np.sum(self.measure[gap < self.slack]))

    def _integral_log(self):
        # previous choice of the same cell for every record
        by_cell = np.lexsort((self.rec_n, self.rec_c))
        prev = np.zeros(self.rec_n.size, dtype=np.int64)
        c_sorted = self.rec_c[by_cell]
        n_sorted = self.rec_n[by_cell]
        same = np.concatenate([[False], c_sorted[1:] == c_sorted[:-1]])
        prev_sorted = np.where(same, np.concatenate([[0], n_sorted[:-1]]), 0)
        prev[by_cell] = prev_sorted
        coeff = np.where(np.isinf(self.measure), 0.0, self.measure)[self.rec_c]
        delta = coeff[:, None] * (self.U[self.rec_n] - self.U[prev])
        self._cum = np.cumsum(delta, axis=0) if delta.size else np.zeros((0, self.U.shape[1]))

    # ------------------------------------------------------------------
    def choice(self, n: int) -> np.ndarray:
        """Selected dense-sequence index ``j*`` for every cell at step ``n``."""
        if not 0 <= n <= self.n_max:
            raise IndexError(f"n={n} outside 0..{self.n_max}")
        k = np.searchsorted(self.rec_n, n, side="right")
        j = np.zeros(self.F.shape[0], dtype=np.int64)
        np.maximum.at(j, self.rec_c[:k], self.rec_n[:k])
        return j

    def cell_values(self, n: int) -> np.ndarray:
        return self.U[self.choice(n)]

    def integral(self, n: int) -> np.ndarray:
        """``bint_sf(s_n)`` from the record log."""
        if not 0 <= n <= self.n_max:
            raise IndexError(f"n={n} outside 0..{self.n_max}")
        if isinstance(self.space, FiniteSpace):
            # few atoms: sum exactly instead of reading the running log
            coeff = np.where(np.isinf(self.measure), 0.0, self.measure)
            vals = self.cell_values(n)
            return np.array([math.fsum(coeff * vals[:, k]) for k in range(vals.shape[1])])
        k = np.searchsorted(self.rec_n, n, side="right")
        if k == 0:
            return np.zeros(self.U.shape[1])
        return self._cum[k - 1].copy()

    def cell_of(self, xs) -> np.ndarray:
        xs = np.asarray(xs)
        if self.breaks is None:
            return xs.astype(np.int64)
        return np.searchsorted(self.breaks, xs, side="right") - 1

    def values_at(self, xs, n: int) -> np.ndarray:
        return self.cell_values(n)[self.cell_of(xs)]

    def simple_fn(self, n: int) -> SimpleFn:
        j = self.choice(n)
        idx = np.where(j > 0, j - 1, n)
        if self.breaks is None:
            which = Table(idx)
        else:
            which = StepFn(self.breaks, idx)
        return SimpleFn(self.space, which, PrefixValues(self.U, n), n, self.f.carrier)

    def error_fn(self, n: int):
        """``|f - s_n|`` as a NonNegFn for ``lint_p``."""
        vals = self.cell_values(n)
        if isinstance(self.space, FiniteSpace):
            return Tabulated(self.space, np.linalg.norm(self.F - vals, axis=1))
        f, cell_of = self.f, self.cell_of
        return PiecewiseLipschitz(
            self.space, lambda xs: np.linalg.norm(f(xs) - vals[cell_of(xs)], axis=1),
            f.lipschitz, self.breaks[1:-1])

    def l1(self, n: int, depth: int | None = None):
        d = self.resolution if depth is None else max(depth, self.resolution)
        return lint_p(self.space, self.error_fn(n), d)


def teschl_step(f: VectorFn, u: DenseSeq, n: int, space: MeasureSpace | None = None,
                resolution: int = 12) -> SimpleFn:
    space = f.space if space is None else space
    return TeschlEngine(space, f, u, n, resolution).simple_fn(n)
