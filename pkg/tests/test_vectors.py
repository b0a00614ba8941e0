import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bochnerlab.vectors import (
    COMPLEX, REAL, CarrierMismatch, ConvergenceError, RVec, Vector, VSpace, cauchy_check,
    seq_limit_check, seq_limit_estimate, seq_limit_index, v_add, v_dist, v_neg, v_norm, v_scal,
    v_zero,
)

E1 = Vector(RVec(2), [1.0, 0.0])
ZERO2 = v_zero(RVec(2))


def test_carrier_ops():
    assert v_add(Vector(RVec(2), [1, 2]), Vector(RVec(2), [3, -1])) == Vector(RVec(2), [4, 1])
    v = Vector(RVec(3), [1.5, -2, 7])
    assert v_scal(0, v) == v_zero(RVec(3))
    assert v_norm(Vector(RVec(2), [3, 4])) == 5.0
    assert v_neg(v) == v_scal(-1, v)


def test_carrier_mismatch():
    with pytest.raises(CarrierMismatch):
        v_add(Vector(RVec(2), [1, 2]), Vector(COMPLEX, [1, 2]))
    with pytest.raises(ValueError):
        Vector(RVec(2), [1.0])
    with pytest.raises(ValueError):
        Vector(REAL, [np.nan])


def test_tags_and_json():
    for sp in (REAL, COMPLEX, RVec(1), RVec(4)):
        assert VSpace.from_tag(sp.tag) == sp
    v = Vector(COMPLEX, [1.0, -2.0])
    assert Vector.from_json(v.to_json()) == v
    assert COMPLEX.d == 2


def test_seq_limit_check_examples():
    assert seq_limit_check(lambda n: E1, E1, 1e-9, 0)
    u = lambda n: v_add(E1, v_scal(1 / (n + 1), E1))
    assert seq_limit_check(u, E1, 1e-3, 2000)
    assert not seq_limit_check(lambda n: E1, ZERO2, 0.5, 0)


def test_cauchy_check_examples():
    assert cauchy_check(lambda n: E1, 1e-12, 0, 10)
    assert not cauchy_check(lambda n: v_scal((-1) ** n, E1), 1.0, 0, 10)
    partial = lambda n: v_scal(sum(2.0 ** -k for k in range(n + 1)), E1)
    assert cauchy_check(partial, 1e-6, 25, 100)
    with pytest.raises(ValueError):
        cauchy_check(partial, 1e-6, 0, 0)


def test_seq_limit_estimate_examples():
    c = Vector(RVec(2), [0.3, -1])
    assert seq_limit_estimate(lambda n: c, 1e-6, 10) == c
    est = seq_limit_estimate(lambda n: v_scal(1 - 2.0 ** -n, E1), 1e-4, 1000)
    assert v_dist(est, E1) < 1e-4
    with pytest.raises(ConvergenceError) as ei:
        seq_limit_estimate(lambda n: v_scal(n, E1), 1e-3, 50, window=10)
    assert "no convergence detected" in str(ei.value)
    assert ei.value.diameter > 0


def test_estimate_is_close_to_later_terms():
    u = lambda n: v_scal(1 / (n + 1), E1)
    n, v = seq_limit_index(u, 1e-3, 100_000, window=50)
    assert all(v_dist(v, u(k)) < 1e-3 for k in range(n, n + 51))
    assert not cauchy_check(u, 1e-3, n - 1, 50) or n == 0


vec2 = st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=2).map(lambda c: Vector(RVec(2), c))


@given(vec2, vec2, st.floats(-100, 100))
def test_norm_axioms(u, v, a):
    assert v_norm(ZERO2) == 0
    assert v_norm(u) >= 0
    assert abs(v_norm(v_scal(a, u)) - abs(a) * v_norm(u)) <= 1e-12 * max(1.0, abs(a) * v_norm(u))
    assert v_norm(v_add(u, v)) <= v_norm(u) + v_norm(v) + 1e-12 * max(1.0, v_norm(u) + v_norm(v))


def test_norm_axioms_bulk():
    rng = np.random.default_rng(0)
    for sp in (REAL, RVec(3), COMPLEX):
        U = rng.normal(size=(10_000, sp.d)) * 10
        V = rng.normal(size=(10_000, sp.d)) * 10
        a = rng.uniform(-10, 10, size=10_000)
        nu, nv = np.linalg.norm(U, axis=1), np.linalg.norm(V, axis=1)
        assert np.all(np.abs(np.linalg.norm(a[:, None] * U, axis=1) - np.abs(a) * nu) <= 1e-12 * (1 + np.abs(a) * nu))
        assert np.all(np.linalg.norm(U + V, axis=1) <= nu + nv + 1e-12)


@given(st.floats(1e-6, 1.0), st.floats(0, 1.0))
def test_limit_check_monotone_in_eps(eps, extra):
    u = lambda n: v_scal(1 / (n + 1), E1)
    if seq_limit_check(u, ZERO2, eps, 50, 20):
        assert seq_limit_check(u, ZERO2, eps + extra, 50, 20)
    if cauchy_check(u, eps, 50, 20):
        assert cauchy_check(u, eps + extra, 50, 20)
