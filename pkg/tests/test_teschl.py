import numpy as np
import pytest

from bochnerlab.bochner import VectorFn, bint_sf, constant, from_table, teschl_step
from bochnerlab.bochner.teschl import TeschlEngine
from bochnerlab.separability import dense_seq, dyadic_seq
from bochnerlab.simple_fn import integrable_sf
from bochnerlab.spaces import FiniteSpace, IntervalSpace
from bochnerlab.vectors import REAL, RVec

I = IntervalSpace()


def brute_choice(F, U, n):
    """First minimal index among U[0..n] for every row of F."""
    d = ((F[:, None, :] - U[None, : n + 1, :]) ** 2).sum(-1)
    return d.argmin(axis=1)


def test_exact_hit_constant():
    u = dense_seq(RVec(2))
    k = 37
    c = u(k)
    f = constant(I, c)
    for n in (k, k + 5, 500):
        s = teschl_step(f, u, n, resolution=6)
        assert np.array_equal(s.eval_many(np.linspace(0, 0.99, 50)), np.tile(c.coords, (50, 1)))
    e = TeschlEngine(I, f, u, 500, 6)
    assert np.all(e.choice(500) == k)


def test_n_zero_is_zero(pair_fn):
    s = teschl_step(pair_fn, dense_seq(RVec(2)), 0, resolution=8)
    assert s.max_which == 0 and not np.any(s.eval_many(np.linspace(0, 0.999, 100)))


def test_slot_layout():
    u = dense_seq(REAL)
    sp = FiniteSpace([1, 1, 1])
    f = from_table(sp, [0.5, -2.0, 0.0])
    s = teschl_step(f, u, 10)
    vals = s.val.materialize()
    U = u.prefix(11)
    assert np.array_equal(vals[:10], U[1:11]) and not np.any(vals[10])
    assert s.max_which == 10


def test_finite_matches_brute_force():
    rng = np.random.default_rng(7)
    u = dense_seq(RVec(2))
    for _ in range(20):
        n_pts = int(rng.integers(1, 30))
        sp = FiniteSpace(rng.random(n_pts).tolist())
        F = rng.uniform(-3, 3, (n_pts, 2))
        e = TeschlEngine(sp, from_table(sp, F), u, 3000, checkpoints=[0, 10, 100, 1000])
        U = u.prefix(3001)
        for n in (0, 1, 10, 99, 1000, 3000):
            assert np.array_equal(e.choice(n), brute_choice(F, U, n))


def test_interval_matches_brute_force_without_slack():
    # piecewise constant: Lipschitz 0 between breakpoints, so no guard margin
    f = VectorFn(I, lambda x: np.where(x < 0.3, 0.71, -1.37), REAL, 0.0, [0.3])
    u = dense_seq(REAL)
    e = TeschlEngine(I, f, u, 2000, 5)
    U = u.prefix(2001)
    for n in (0, 3, 50, 2000):
        assert np.array_equal(e.choice(n), brute_choice(e.F, U, n))


def test_integral_log_matches_bint_sf(pair_fn):
    e = TeschlEngine(I, pair_fn, dense_seq(RVec(2)), 20_000, 10, [100, 1000])
    for n in (0, 1, 7, 100, 999, 5000, 20_000):
        s = e.simple_fn(n)
        assert integrable_sf(s)
        assert np.allclose(e.integral(n), bint_sf(s).coords, rtol=0, atol=1e-12)


def test_domination_at_probes(pair_fn):
    e = TeschlEngine(I, pair_fn, dense_seq(RVec(2)), 50_000, 12, [10, 100, 1000, 10_000])
    xs = np.random.default_rng(0).random(1000)
    fx = pair_fn(xs)
    for n in (0, 1, 2, 10, 100, 1000, 10_000, 50_000):
        err = np.linalg.norm(fx - e.values_at(xs, n), axis=1)
        assert np.all(err <= np.linalg.norm(fx, axis=1) + 1e-12)


def test_domination_with_dyadic_sequence():
    f = VectorFn(I, lambda x: np.sin(6 * x), REAL, 6.0)
    e = TeschlEngine(I, f, dyadic_seq(REAL), 5000, 10)
    xs = np.linspace(0, 1, 997, endpoint=False)
    for n in (10, 100, 5000):
        assert np.all(np.abs(f(xs) - e.values_at(xs, n)) <= np.abs(f(xs)) + 1e-12)


def test_misclassification_reported(pair_fn):
    e = TeschlEngine(I, pair_fn, dense_seq(RVec(2)), 1000, 8, [10, 100])
    assert [c.n for c in e.checkpoints] == [10, 100, 1000]
    assert all(0.0 <= c.misclassified <= 1.0 for c in e.checkpoints)
    sp = FiniteSpace([1, 2])
    ef = TeschlEngine(sp, from_table(sp, [1.0, 2.0]), dense_seq(REAL), 50)
    assert ef.checkpoints[-1].misclassified == 0.0


def test_requires_zero_first(pair_fn):
    with pytest.raises(ValueError, match="zero-first"):
        TeschlEngine(I, pair_fn, dense_seq(RVec(2), zero_first=False), 10)
    with pytest.raises(ValueError):
        TeschlEngine(I, pair_fn, dense_seq(REAL), 10)
