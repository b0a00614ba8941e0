"""Integral of integrable simple functions and its brute-force oracle."""

from __future__ import annotations

import math

import numpy as np

from ..simple_fn import SimpleFn, nonintegrable_index, sf_norm, sf_plus, sf_scal
from ..spaces import FiniteSpace, present_parts
from ..vectors import Vector


class IntegrabilityError(ValueError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


def bint_sf(sf: SimpleFn) -> Vector:
    """Sum over parts of ``real(mu(part n)) * val[n]``.

    Only nonempty parts are visited; an empty part has measure 0 and
    contributes the zero vector.  The last part may have infinite measure:
    ``real(inf) = 0`` and ``val[max_which] = 0`` make its term vanish.
    """
    bad = nonintegrable_index(sf)
    if bad is not None:
        raise IntegrabilityError(f"infinite measure on nonzero part {bad}", bad)
    idx, finite, infinite = present_parts(sf.space, sf.which)
    coeff = np.where(infinite, 0.0, finite)
    terms = coeff[:, None] * sf.val.take(idx)
    return Vector(sf.carrier, [math.fsum(terms[:, k]) for k in range(terms.shape[1])])


def bint_sf_oracle(sf: SimpleFn) -> Vector:
    """Pointwise sum ``sum_x real(mu{x}) * sf(x)`` on a finite space."""
    if not isinstance(sf.space, FiniteSpace):
        raise TypeError("the pointwise oracle needs a finite space")
    masses = sf.space.mass_array
    vals = sf.eval_many(np.arange(sf.space.n_points))
    coeff = np.where(np.isinf(masses), 0.0, masses)
    return Vector(sf.carrier, [math.fsum(coeff * vals[:, k]) for k in range(vals.shape[1])])


def linearity_gap(f: SimpleFn, g: SimpleFn, a: float, b: float) -> float:
    """Max-norm gap of ``bint(a f + b g) - (a bint(f) + b bint(g))``."""
    lhs = bint_sf(sf_plus(sf_scal(a, f), sf_scal(b, g))).coords
    rhs = a * bint_sf(f).coords + b * bint_sf(g).coords
    return float(np.max(np.abs(lhs - rhs)))


def triangle_gap(f: SimpleFn) -> float:
    """``|bint(f)| - bint(|f|)``; nonpositive when the triangle inequality holds."""
    return float(np.linalg.norm(bint_sf(f).coords) - bint_sf(sf_norm(f)).coords[0])


def ext_gap(f: SimpleFn, g: SimpleFn) -> float:
    """Max-norm gap between the integrals of two representations."""
    return float(np.max(np.abs(bint_sf(f).coords - bint_sf(g).coords)))
