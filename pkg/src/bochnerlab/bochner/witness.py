"""Bochner-integrability witnesses and the limiting integral.

A ``BifWitness`` packages a function with an approximating sequence of
integrable simple functions and the evidence gathered for it:

* ``integrable``: ``integrable_sf`` of every checked ``seq(n)``;
* ``pw``: pointwise convergence at probe points over the final window;
* ``l1``: ``lint_p(|f - seq(n)|)`` with its certified bound at checkpoints.

Everything is a finite surrogate of the corresponding limit statement and
records exactly what was checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..lebesgue import LIntResult, PiecewiseLipschitz, Tabulated, lint_p
from ..separability import DenseSeq, dense_seq
from ..simple_fn import (
    SimpleFn, integrable_sf, sf_eval, sf_norm, sf_plus, sf_scal,
)
from ..spaces import FiniteSpace, MeasureSpace
from ..vectors import (
    REAL, ConvergenceError, Vector, cauchy_check, seq_limit_check, seq_limit_index, v_dist,
)
from .functions import VectorFn, added, nonneg_of, norm_of, scaled
from .integral import bint_sf
from .teschl import TeschlEngine

DEFAULT_CHECKPOINTS = (0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000,
                       10_000, 20_000, 50_000, 100_000, 200_000, 500_000,
                       1_000_000, 2_000_000, 5_000_000)
# slack for floating rounding in the domination check
DOMINATION_TOL = 1e-12


class WitnessError(RuntimeError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass
class L1Row:
    n: int
    value: float
    bound: float
    integrable: bool
    misclassified: float = 0.0

    @property
    def upper(self) -> float:
        return self.value + self.bound


@dataclass
class PointwiseReport:
    ok: bool
    eps: float
    N: int
    window: int
    n_probes: int
    max_distance: float
    failures: list = field(default_factory=list)


@dataclass
class BifWitness:
    space: MeasureSpace
    f: VectorFn
    seq: Callable[[int], SimpleFn]
    integral_at: Callable[[int], np.ndarray]
    n_max: int
    l1: list[L1Row]
    pw: PointwiseReport
    norm_integral: LIntResult
    resolution: int
    probes: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def integrable_evidence(self) -> dict[int, bool]:
        return {r.n: r.integrable for r in self.l1}

    @property
    def l1_evidence(self) -> list[L1Row]:
        return self.l1

    def first_below(self, threshold: float) -> int | None:
        """First checkpoint whose certified l1 upper bound is below ``threshold``."""
        for r in self.l1:
            if r.upper < threshold:
                return r.n
        return None


# --------------------------------------------------------------------------
# evidence helpers

def default_probes(space: MeasureSpace, count: int = 1000, seed: int = 0) -> np.ndarray:
    if isinstance(space, FiniteSpace):
        return np.arange(space.n_points)
    return np.sort(np.random.default_rng(seed).random(count))


def _window_start(n_max: int, window: int) -> int:
    return max(n_max - window, 0)


def _pointwise(f: VectorFn, values_at: Callable[[np.ndarray, int], np.ndarray], probes, n_max: int,
               eps: float, window: int) -> PointwiseReport:
    N = _window_start(n_max, window)
    w = n_max - N
    fx = f(probes)
    traj = np.stack([values_at(probes, n) for n in range(N, N + w + 1)])  # (w+1, P, d)
    dist = np.sqrt(((traj - fx[None]) ** 2).sum(-1))
    failures = []
    for p in np.flatnonzero(dist.max(0) >= eps)[:20]:
        failures.append(probes[p].item())
    # seq_limit_check on the first probe as the reference route
    x0 = probes[0]
    l0 = Vector(f.carrier, fx[0])
    ref = seq_limit_check(lambda n: Vector(f.carrier, values_at(np.array([x0]), n)[0]), l0, eps, N, w)
    ok = not failures
    if ref != bool(dist[:, 0].max() < eps):
        raise AssertionError("pointwise evidence disagrees with seq_limit_check")
    return PointwiseReport(ok, eps, N, w, len(probes), float(dist.max()), failures)


def _check_l1_rows(rows: list[L1Row], norm_int: LIntResult):
    for r in rows:
        if math.isinf(r.value):
            raise WitnessError(f"l1 evidence is infinite at n={r.n}")
        if r.value > norm_int.upper() + 1e-9:
            raise WitnessError(f"l1 evidence {r.value} at n={r.n} exceeds lint_p(|f|) = {norm_int.upper()}")
        if not r.integrable:
            raise WitnessError(f"integrability violated at n={r.n}")


# --------------------------------------------------------------------------
# construction from a dense sequence

def bif_from_separable(space: MeasureSpace, f: VectorFn, u: DenseSeq, n_max: int,
                       resolution: int = 12, checkpoints: Sequence[int] | None = None,
                       probes=None, pw_eps: float = 5e-2, window: int = 100,
                       seed: int = 0) -> BifWitness:
    """Witness built from the nearest-point approximations of ``f`` in ``u``."""
    if f.space != space:
        raise ValueError("function lives on a different space")
    norm_int = lint_p(space, nonneg_of(f), resolution)
    if not norm_int.value.is_finite:
        raise WitnessError("norm not integrable: lint_p(|f|) = inf")
    if checkpoints is None:
        checkpoints = [c for c in DEFAULT_CHECKPOINTS if c < n_max] + [n_max]
    engine = TeschlEngine(space, f, u, n_max, resolution, checkpoints)
    mis = {c.n: c.misclassified for c in engine.checkpoints}
    rows = []
    for c in engine.checkpoints:
        res = engine.l1(c.n)
        ok = integrable_sf(engine.simple_fn(c.n))
        rows.append(L1Row(c.n, res.value.value, res.error_bound, ok, mis[c.n]))
    _check_l1_rows(rows, norm_int)
    probes = default_probes(space, seed=seed) if probes is None else np.asarray(probes)
    # s_n(x) converges to f at the cell midpoint, which is within L h / 2 of f(x)
    res_slack = 0.0 if isinstance(space, FiniteSpace) else 0.5 * f.lipschitz * float(np.max(engine.measure))
    pw = _pointwise(f, engine.values_at, probes, n_max, pw_eps + res_slack, window)
    dom = _domination(f, engine.values_at, probes, [c.n for c in engine.checkpoints])
    return BifWitness(space, f, engine.simple_fn, engine.integral, n_max, rows, pw, norm_int,
                      resolution, probes,
                      meta={"dense_seq": u.name, "engine": engine, "domination": dom,
                            "resolution_slack": res_slack})


def _domination(f: VectorFn, values_at, probes, ns) -> dict:
    fx = f(probes)
    fnorm = np.linalg.norm(fx, axis=1)
    worst = -math.inf
    for n in ns:
        err = np.linalg.norm(fx - values_at(probes, n), axis=1)
        worst = max(worst, float(np.max(err - fnorm)))
    return {"ok": worst <= DOMINATION_TOL, "worst_excess": worst, "checked_n": list(ns)}


def bif_real(space: MeasureSpace, f: VectorFn, n_max: int, resolution: int = 12, **kw) -> BifWitness:
    """Real-valued case: the rational enumeration is the dense sequence."""
    if f.carrier != REAL:
        raise ValueError("bif_real needs a real-valued function")
    return bif_from_separable(space, f, dense_seq(REAL, True), n_max, resolution, **kw)


# --------------------------------------------------------------------------
# algebra on witnesses

def _derived(space, f: VectorFn, seq, ns, n_max, resolution, probes, pw_eps, window, norm_int, name) -> BifWitness:
    def integral_at(n):
        return bint_sf(seq(n)).coords

    def values_at(xs, n):
        return seq(n).eval_many(xs)

    rows = []
    for n in ns:
        s = seq(n)
        err = _error_fn(f, s)
        res = lint_p(space, err, resolution)
        rows.append(L1Row(n, res.value.value, res.error_bound, integrable_sf(s)))
    for r in rows:
        if math.isinf(r.value):
            raise WitnessError(f"l1 evidence is infinite at n={r.n}")
        if not r.integrable:
            raise WitnessError(f"integrability violated at n={r.n}")
    pw = _pointwise(f, values_at, probes, n_max, pw_eps, window)
    return BifWitness(space, f, seq, integral_at, n_max, rows, pw, norm_int, resolution, probes,
                      meta={"derived": name})


def _error_fn(f: VectorFn, s: SimpleFn):
    if isinstance(f.space, FiniteSpace):
        pts = np.arange(f.space.n_points)
        return Tabulated(f.space, np.linalg.norm(f(pts) - s.eval_many(pts), axis=1))
    br = s.which.breaks[1:-1]
    return PiecewiseLipschitz(f.space, lambda xs: np.linalg.norm(f(xs) - s.eval_many(xs), axis=1),
                              f.lipschitz, tuple(br) + f.breakpoints)


def _common(bf: BifWitness, bg: BifWitness):
    if bf.space != bg.space:
        raise ValueError("witnesses over different spaces")
    if bf.f.carrier != bg.f.carrier:
        raise ValueError("witnesses with different carriers")
    ns = sorted({r.n for r in bf.l1} & {r.n for r in bg.l1})
    return ns, min(bf.n_max, bg.n_max)


def _pw_eps(*ws: BifWitness) -> float:
    return sum(w.pw.eps for w in ws)


def bif_plus(bf: BifWitness, bg: BifWitness) -> BifWitness:
    ns, n_max = _common(bf, bg)
    f = added(bf.f, bg.f)
    seq = lambda n: sf_plus(bf.seq(n), bg.seq(n))
    norm_int = lint_p(bf.space, nonneg_of(f), bf.resolution)
    return _derived(bf.space, f, seq, ns, n_max, bf.resolution, bf.probes, _pw_eps(bf, bg),
                    min(bf.pw.window, bg.pw.window), norm_int, "plus")


def bif_scal(a: float, bf: BifWitness) -> BifWitness:
    f = scaled(a, bf.f)
    seq = lambda n: sf_scal(a, bf.seq(n))
    norm_int = lint_p(bf.space, nonneg_of(f), bf.resolution)
    return _derived(bf.space, f, seq, [r.n for r in bf.l1], bf.n_max, bf.resolution, bf.probes,
                    max(abs(a), 1e-300) * bf.pw.eps if a != 0 else bf.pw.eps, bf.pw.window,
                    norm_int, f"scal({a})")


def bif_neg(bf: BifWitness) -> BifWitness:
    return bif_scal(-1.0, bf)


def bif_minus(bf: BifWitness, bg: BifWitness) -> BifWitness:
    return bif_plus(bf, bif_neg(bg))


def bif_norm(bf: BifWitness) -> BifWitness:
    f = norm_of(bf.f)
    seq = lambda n: sf_norm(bf.seq(n))
    norm_int = lint_p(bf.space, nonneg_of(f), bf.resolution)
    return _derived(bf.space, f, seq, [r.n for r in bf.l1], bf.n_max, bf.resolution, bf.probes,
                    bf.pw.eps, bf.pw.window, norm_int, "norm")


# --------------------------------------------------------------------------
# the integral

@dataclass
class BIntResult:
    value: Vector
    n_start: int
    n_star: int
    l1_upper: float
    eps: float
    window: int


def bint_detail(bf: BifWitness, eps: float = 1e-3, window: int = 100,
                l1_tol: float | None = None) -> BIntResult:
    """Cauchy-stabilized limit of ``bint_sf(seq(n))``.

    The scan starts at a checkpoint with certified l1 evidence: the first
    one below ``l1_tol`` if given, otherwise the one with the smallest bound
    that still leaves room for the window.  From there every term is within
    that bound of the integral.  The returned term must additionally close a
    Cauchy window of width ``window`` at tolerance ``eps``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    room = [r for r in bf.l1 if r.n + window <= bf.n_max]
    if l1_tol is None:
        start = min(room, key=lambda r: (r.upper, r.n), default=None)
        if start is None:
            raise ConvergenceError(
                f"no convergence detected: window {window} does not fit below n_max={bf.n_max}",
                last_index=bf.n_max)
    else:
        start = next((r for r in room if r.upper <= l1_tol), None)
        if start is None:
            best = min((r.upper for r in bf.l1), default=math.inf)
            raise ConvergenceError(
                f"no convergence detected: l1 evidence never below {l1_tol:g} "
                f"with room for window {window} (best {best:.3g})",
                diameter=best, last_index=bf.n_max)
    n0 = start.n
    carrier = bf.f.carrier
    term = lambda k: Vector(carrier, bf.integral_at(n0 + k))
    k, v = seq_limit_index(term, eps, bf.n_max - window - n0, window)
    if not cauchy_check(term, eps, k, window):
        raise ConvergenceError(f"no convergence detected: Cauchy window fails at n={n0 + k}",
                               last_index=n0 + k)
    return BIntResult(v, n0, n0 + k, start.upper, eps, window)


def bint(bf: BifWitness, eps: float = 1e-3, window: int = 100, l1_tol: float | None = None) -> Vector:
    return bint_detail(bf, eps, window, l1_tol).value


def bint_ext_check(bf: BifWitness, bf2: BifWitness, probes=None, eps: float = 1e-3,
                   window: int = 100, l1_tol: float | None = None, tol: float | None = None) -> bool:
    """Two witnesses of pointwise-equal functions give the same integral."""
    probes = bf.probes if probes is None else np.asarray(probes)
    if np.max(np.abs(bf.f(probes) - bf2.f(probes))) > 1e-12:
        raise PreconditionError("functions differ at a probe point")
    a = bint_detail(bf, eps, window, l1_tol)
    b = bint_detail(bf2, eps, window, l1_tol)
    if tol is None:
        tol = a.l1_upper + b.l1_upper
    return v_dist(a.value, b.value) <= tol


# --------------------------------------------------------------------------
# strong measurability

class NotConvergent(ValueError):
    pass


@dataclass
class StrongMeasWitness:
    f: VectorFn
    seq: Callable[[int], SimpleFn]
    probes: np.ndarray
    eps: float
    N: int
    window: int


def strong_meas_witness(f: VectorFn, seq: Callable[[int], SimpleFn], probes, eps: float = 1e-3,
                        N: int = 10, window: int = 10) -> StrongMeasWitness:
    """Check ``seq(n)(x) -> f(x)`` on the probes over ``[N, N + window]``."""
    probes = np.asarray(probes)
    for x in probes:
        x = x.item()
        if not seq_limit_check(lambda n: sf_eval(seq(n), x), f.at(x), eps, N, window):
            raise NotConvergent(f"not convergent at probe x={x}")
    return StrongMeasWitness(f, seq, probes, eps, N, window)


def compose_limits(witnesses: Sequence[StrongMeasWitness], f: VectorFn, probes=None,
                   eps: float | None = None) -> StrongMeasWitness:
    """Witness for ``f = lim f_k`` by diagonal extraction.

    For each ``k`` the first index ``n_k`` is taken at which ``seq_k`` is
    within ``2^-k`` of ``f_k`` on every probe; the new sequence is
    ``k -> seq_k(n_k)``.
    """
    probes = witnesses[0].probes if probes is None else np.asarray(probes)
    chosen = []
    for k, w in enumerate(witnesses):
        target = 2.0 ** -k
        fk = w.f(probes)
        n = 0
        while True:
            if np.max(np.linalg.norm(w.seq(n).eval_many(probes) - fk, axis=1)) < target:
                break
            n += 1
            if n > w.N + w.window + 10_000:
                raise NotConvergent(f"level {k} never within {target:g} on the probes")
        chosen.append(w.seq(n))
    K = len(chosen)
    N = K // 2
    if eps is None:
        # level k is within 2^-k of f_k, and f_k within its own gap of f
        fx = f(probes)
        gaps = [2.0 ** -k + float(np.max(np.linalg.norm(witnesses[k].f(probes) - fx, axis=1)))
                for k in range(N, K)]
        eps = 2.0 * max(gaps)
    seq = lambda k: chosen[min(k, K - 1)]
    return strong_meas_witness(f, seq, probes, eps, N, K - 1 - N)
