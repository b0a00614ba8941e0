import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bochnerlab.extreal import INF, XReal
from bochnerlab.lebesgue import (
    DomainError, PiecewiseLipschitz, SimpleNN, Tabulated, dyadic_grid, lint_p, lint_p_simple,
    markov_fraction,
)
from bochnerlab.simple_fn import sf_indicator, sf_plus, sf_zero
from bochnerlab.spaces import FiniteSpace, IntervalSet, IntervalSpace, PointSet
from bochnerlab.vectors import REAL, Vector

I = IntervalSpace()


def oracle(space, values):
    m = space.mass_array
    if np.any(np.isinf(m) & (values > 0)):
        return math.inf
    return math.fsum(np.where(np.isinf(m), 0.0, m) * values)


def test_lint_p_simple_examples():
    sp = FiniteSpace([0.1, 0.2, 0.7])
    sf = sf_indicator(sp, PointSet.of([0, 1]), Vector(REAL, [2.0]))
    assert lint_p_simple(SimpleNN(sf)) == XReal(oracle(sp, np.array([2.0, 2.0, 0.0])))
    assert math.isclose(lint_p_simple(sf).value, 0.6, rel_tol=1e-15)
    inf_sp = FiniteSpace([1, "inf"])
    assert lint_p_simple(sf_indicator(inf_sp, PointSet.of([1]), Vector(REAL, [1.0]))) == INF
    assert lint_p_simple(sf_zero(inf_sp)) == XReal(0)
    with pytest.raises(DomainError):
        SimpleNN(sf_indicator(sp, PointSet.of([0]), Vector(REAL, [-1.0])))


def test_lint_p_examples():
    sp = FiniteSpace([1, 2])
    assert lint_p(sp, Tabulated(sp, [3, 0.5])).value == XReal(4)
    prev = 0.0
    for d in (4, 8, 12, 16):
        r = lint_p(I, PiecewiseLipschitz(I, lambda x: x, 1.0), d)
        assert r.value.value >= prev
        assert r.value.value <= 0.5 <= r.upper()
        assert r.error_bound <= 2.0 ** -d + 1.0 * 2.0 ** -d
        prev = r.value.value
    assert abs(prev - 0.5) < 1e-4
    zero = PiecewiseLipschitz(I, lambda x: np.zeros_like(x), 0.0)
    for d in (0, 3, 10):
        assert lint_p(I, zero, d).value == XReal(0)


def test_lint_p_interval_simple_is_exact():
    sf = sf_indicator(I, IntervalSet.of([(0.25, 0.5)]), Vector(REAL, [3.0]))
    assert lint_p(I, SimpleNN(sf)).value == XReal(0.75)


def test_breakpoints_make_step_exact():
    step = PiecewiseLipschitz(I, lambda x: np.where(x < 1 / 3, 1.0, 0.0), 0.0, [1 / 3])
    r = lint_p(I, step, 10)
    assert abs(r.value.value - 1 / 3) < 2 ** -10 and r.value.value <= 1 / 3 <= r.upper()


def test_overflow_flag():
    sp = FiniteSpace([1e308, 1e308])
    r = lint_p(sp, Tabulated(sp, [10.0, 10.0]))
    assert r.value == INF and r.overflow
    sp2 = FiniteSpace([1.0, "inf"])
    r2 = lint_p(sp2, Tabulated(sp2, [1.0, 1.0]))
    assert r2.value == INF and not r2.overflow


def test_markov_examples():
    sp = FiniteSpace([0.3, 0.7])
    ind = Tabulated(sp, [2.0, 0.0])
    assert markov_fraction(sp, ind, 1.0) == XReal(0.3)
    assert markov_fraction(sp, Tabulated(sp, [0, 0]), 0.5) == XReal(0)
    m = markov_fraction(I, PiecewiseLipschitz(I, lambda x: x, 1.0), 0.5, depth=14)
    assert 0.5 - 1e-3 < m.value <= 0.5


def test_dyadic_grid():
    g = dyadic_grid(2, [0.3, 0.5, 0.5 + 1e-14])
    assert g.tolist() == [0.0, 0.25, 0.3, 0.5, 0.75, 1.0]


masses = st.lists(st.one_of(st.floats(0, 10), st.just(math.inf)), min_size=1, max_size=10)


@given(masses, st.data())
def test_finite_equals_oracle(ms, data):
    sp = FiniteSpace(ms)
    vals = np.array(data.draw(st.lists(st.floats(0, 100), min_size=len(ms), max_size=len(ms))))
    r = lint_p(sp, Tabulated(sp, vals)).value
    assert r.value == oracle(sp, vals)


@given(st.floats(0, 5), st.floats(0, 5), st.integers(2, 12))
def test_monotone_in_function(a, b, d):
    f = PiecewiseLipschitz(I, lambda x: a * x, a)
    g = PiecewiseLipschitz(I, lambda x: a * x + b, a)
    assert lint_p(I, f, d).value.value <= lint_p(I, g, d).value.value


@given(st.floats(0.1, 5), st.integers(1, 11))
def test_monotone_in_depth(a, d):
    f = PiecewiseLipschitz(I, lambda x: a * np.abs(np.sin(7 * x)), 7 * a)
    assert lint_p(I, f, d).value.value <= lint_p(I, f, d + 1).value.value


@given(masses, st.data())
def test_simple_additive(ms, data):
    sp = FiniteSpace(ms)
    n = len(ms)
    s1 = PointSet.of(sorted(set(data.draw(st.lists(st.integers(0, n - 1), max_size=n)))))
    s2 = PointSet.of(sorted(set(data.draw(st.lists(st.integers(0, n - 1), max_size=n)))))
    v1, v2 = data.draw(st.floats(0, 10)), data.draw(st.floats(0, 10))
    f = sf_indicator(sp, s1, Vector(REAL, [v1]))
    g = sf_indicator(sp, s2, Vector(REAL, [v2]))
    lhs = lint_p_simple(sf_plus(f, g))
    a, b = lint_p_simple(f), lint_p_simple(g)
    if math.isinf(a.value) or math.isinf(b.value):
        assert lhs == INF
    else:
        assert math.isclose(lhs.value, a.value + b.value, rel_tol=1e-12, abs_tol=1e-12)


@given(masses, st.data(), st.floats(0.01, 50))
def test_markov_inequality_finite(ms, data, t):
    sp = FiniteSpace(ms)
    vals = np.array(data.draw(st.lists(st.floats(0, 100), min_size=len(ms), max_size=len(ms))))
    f = Tabulated(sp, vals)
    lhs = t * markov_fraction(sp, f, t).value if markov_fraction(sp, f, t).is_finite else math.inf
    rhs = lint_p(sp, f).value.value
    assert lhs <= rhs * (1 + 1e-12)


@given(st.floats(0.01, 3), st.floats(0.01, 2))
def test_markov_inequality_interval(a, t):
    f = PiecewiseLipschitz(I, lambda x: a * x * x, 2 * a)
    r = lint_p(I, f, 10)
    assert t * markov_fraction(I, f, t, 10).value <= r.upper() + 1e-12
