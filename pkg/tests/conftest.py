import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from bochnerlab.extreal import XReal
from bochnerlab.simple_fn import SimpleFn
from bochnerlab.spaces import FiniteSpace, Table
from bochnerlab.vectors import REAL, RVec

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CARRIERS = [REAL, RVec(2), RVec(3), RVec(4)]


def xreals(allow_inf=True):
    fin = st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(XReal)
    if not allow_inf:
        return fin
    return st.one_of(fin, st.just(XReal(math.inf)), st.just(XReal(0.0)))


def random_space(rng, max_points=50, p_inf=0.1, p_zero=0.1):
    n = int(rng.integers(1, max_points + 1))
    masses = rng.random(n) * 3
    masses[rng.random(n) < p_zero] = 0.0
    masses[rng.random(n) < p_inf] = math.inf
    return FiniteSpace(masses.tolist())


def random_sf(rng, space: FiniteSpace, carrier=None, integrable=True, max_parts=8, p_zero_val=0.0):
    """Random simple function; infinite atoms are routed to the last (zero) part."""
    carrier = carrier or CARRIERS[int(rng.integers(len(CARRIERS)))]
    m = int(rng.integers(0, max_parts + 1))
    val = rng.uniform(-10, 10, size=(m + 1, carrier.d))
    val[rng.random(m + 1) < p_zero_val] = 0.0
    val[m] = 0.0
    which = rng.integers(0, m + 1, size=space.n_points)
    if integrable:
        which[np.isinf(space.mass_array)] = m
    return SimpleFn(space, Table(which), val, m, carrier)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def pair_fn():
    from bochnerlab.bochner import VectorFn
    from bochnerlab.spaces import IntervalSpace
    return VectorFn(IntervalSpace(), lambda xs: np.stack([xs, 1.0 - xs], -1), RVec(2), math.sqrt(2.0),
                    name="pair")


@pytest.fixture(scope="session")
def pair_witness(pair_fn):
    from bochnerlab.bochner import bif_from_separable
    from bochnerlab.separability import dense_seq
    return bif_from_separable(pair_fn.space, pair_fn, dense_seq(RVec(2)), 1 << 20)
