import itertools
import math

import numpy as np
import pytest

from bochnerlab.bochner import (
    BIntParams, DCTParams, DominationError, VectorFn, bint_vs_lintp, constant,
    dominated_convergence_run, from_table, pointwise_limit, scaled, zero_ae_check,
)
from bochnerlab.lebesgue import PiecewiseLipschitz, Tabulated
from bochnerlab.spaces import FiniteSpace, IntervalSpace
from bochnerlab.vectors import REAL, RVec, Vector

I = IntervalSpace()


def dyadic_table(rng, n):
    masses = (rng.integers(0, 17, n) / 16).astype(float)
    vals = (rng.integers(0, 41, n) / 8).astype(float)
    inf = rng.random(n) < 0.15
    masses[inf] = math.inf
    vals[inf] = 0.0
    return FiniteSpace(masses.tolist()), vals


def test_bint_vs_lintp_finite_exact():
    rng = np.random.default_rng(11)
    for _ in range(20):
        sp, vals = dyadic_table(rng, int(rng.integers(1, 12)))
        rep = bint_vs_lintp(sp, from_table(sp, vals), BIntParams(n_max=4000, window=50))
        assert rep.exact and rep.passed and rep.bint == rep.lint


def test_bint_vs_lintp_identity():
    rep = bint_vs_lintp(I, VectorFn(I, lambda x: x, REAL, 1.0), BIntParams(n_max=1 << 18))
    assert rep.passed and abs(rep.bint - 0.5) <= 1e-3 and abs(rep.lint - 0.5) <= 1e-3


def test_bint_vs_lintp_zero():
    rep = bint_vs_lintp(I, constant(I, Vector(REAL, [0.0])), BIntParams(n_max=500))
    assert rep.bint == 0.0 and rep.lint == 0.0 and rep.passed


def test_bint_vs_lintp_rejects():
    with pytest.raises(ValueError):
        bint_vs_lintp(I, VectorFn(I, lambda x: x - 0.5, REAL, 1.0), BIntParams(n_max=10))


def test_zero_ae_examples():
    sp = FiniteSpace([1.0, 0.0, 2.0])
    r = zero_ae_check(sp, from_table(sp, [0.0, 5.0, 0.0]))
    assert bool(r) and r.lint == 0.0 and r.agrees
    r = zero_ae_check(sp, from_table(sp, [1.0, 0.0, 0.0]))
    assert not r and r.agrees
    assert zero_ae_check(sp, from_table(sp, [0.0, 0.0, 0.0]))


def test_zero_ae_exhaustive():
    for n in range(1, 7):
        for masses in itertools.product([0.0, 1.0, math.inf], repeat=n):
            sp = FiniteSpace(list(masses))
            for pattern in itertools.product([0, 1], repeat=n):
                vals = np.zeros((n, 2))
                vals[:, 0] = pattern
                r = zero_ae_check(sp, from_table(sp, vals))
                expect = all(p == 0 or m == 0 for p, m in zip(pattern, masses))
                assert r.zero_ae == expect and r.agrees
                if n > 3:
                    break


def test_zero_ae_interval():
    bump = VectorFn(I, lambda x: np.where((x >= 0.25) & (x < 0.5), 1.0, 0.0), REAL, 0.0, [0.25, 0.5])
    r = zero_ae_check(I, bump)
    assert not r and abs(r.nonzero_measure - 0.25) < 1e-12
    assert zero_ae_check(I, constant(I, Vector(REAL, [0.0])))


def pair(xs):
    return np.stack([xs, 1.0 - xs], -1)


PAIR = VectorFn(I, pair, RVec(2), math.sqrt(2.0))
G = PiecewiseLipschitz(I, lambda xs: 2 * np.linalg.norm(pair(xs), axis=1), 2 * math.sqrt(2.0))


def test_dct_constant_family():
    p = DCTParams(n_values=(0, 5, 50), n_max=1 << 16, resolution=8)
    rep = dominated_convergence_run(I, lambda n: PAIR, G, p, limit=PAIR)
    assert rep.passed and all(r.diff == 0.0 for r in rep.rows)


def test_dct_scaled_family_short():
    p = DCTParams(n_values=(0, 10, 100), n_max=1 << 19, eps=1e-2)
    rep = dominated_convergence_run(I, lambda n: scaled(1 + 1 / (n + 1), PAIR), G, p, limit=PAIR)
    for r in rep.rows:
        ref = math.sqrt(0.5) / (r.n + 1)
        assert abs(np.linalg.norm(np.array(r.value) - 0.5) - ref) <= 0.2 * ref
    assert rep.passed


def test_dct_estimated_limit():
    p = DCTParams(n_values=(0, 200), n_max=1 << 18, limit_eps=1e-6)
    rep = dominated_convergence_run(I, lambda n: scaled(1 + 1 / (n + 1), PAIR), G, p)
    assert np.allclose(rep.limit_value, 0.5, atol=2e-3)
    assert rep.rows[-1].diff < 5e-3


def test_dct_finite_space():
    sp = FiniteSpace([0.5, 0.25, "inf"])
    base = from_table(sp, [[1, 0], [0, 2], [0, 0]])
    g = Tabulated(sp, 2 * np.linalg.norm(base(np.arange(3)), axis=1))
    rep = dominated_convergence_run(sp, lambda n: scaled(1 + 1 / (n + 1), base), g,
                                    DCTParams(n_values=(0, 3, 1000), n_max=20_000, eps=1e-2))
    assert rep.passed and np.allclose(rep.limit_value, [0.5, 0.5], atol=1e-3)


def test_dct_domination_violated():
    p = DCTParams(n_values=(0, 1), n_max=100)
    with pytest.raises(DominationError, match=r"domination violated at \(n=0"):
        dominated_convergence_run(I, lambda n: scaled(3.0, PAIR), G, p, limit=PAIR)


def test_pointwise_limit():
    lim = pointwise_limit(lambda n: scaled(1 + 2.0 ** -n, PAIR), 1e-8, 10_000, 20)
    xs = np.linspace(0, 0.9, 7)
    assert np.allclose(lim(xs), pair(xs), atol=1e-7)
