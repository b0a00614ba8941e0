"""Nonnegative extended reals: the values a measure can take.

``XReal`` is either a finite real ``x >= 0`` or ``+inf``.  The conventions
that the integral formulas depend on are

* ``0 * inf = inf * 0 = 0``
* ``real(inf) = 0`` (the projection used when a measure is turned into a
  scalar coefficient; together with a zero value vector it kills the
  possibly infinite last part of a simple function).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Union

Number = Union[int, float]


@total_ordering
@dataclass(frozen=True)
class XReal:
    """A nonnegative extended real.  ``value`` is ``math.inf`` for infinity."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v):
            raise ValueError("XReal does not accept NaN")
        if v < 0:
            raise ValueError(f"XReal must be nonnegative, got {v!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def inf(cls) -> XReal:
        return cls(math.inf)

    @classmethod
    def zero(cls) -> XReal:
        return cls(0.0)

    @property
    def is_finite(self) -> bool:
        return self.value != math.inf

    def __add__(self, other):
        return xr_add(self, _coerce(other))

    __radd__ = __add__

    def __mul__(self, other):
        return xr_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __lt__(self, other):
        other = _coerce(other)
        return self.value < other.value

    def __float__(self):
        return self.value

    def __repr__(self):
        return "XReal(inf)" if not self.is_finite else f"XReal({self.value!r})"

    def to_json(self):
        return "inf" if not self.is_finite else self.value

    @classmethod
    def from_json(cls, obj) -> XReal:
        """Parse a number ``>= 0`` or the string ``"inf"``."""
        if isinstance(obj, str):
            if obj.strip().lower() in ("inf", "+inf", "infinity"):
                return cls.inf()
            raise ValueError(f"expected a number >= 0 or 'inf', got {obj!r}")
        if isinstance(obj, bool) or not isinstance(obj, (int, float)):
            raise ValueError(f"expected a number >= 0 or 'inf', got {obj!r}")
        return cls(obj)


INF = XReal.inf()
ZERO = XReal.zero()


def _coerce(x) -> XReal:
    if isinstance(x, XReal):
        return x
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return XReal(x)
    raise TypeError(f"cannot use {type(x).__name__} as XReal")


def xr_add(a: XReal, b: XReal) -> XReal:
    if not (a.is_finite and b.is_finite):
        return INF
    return XReal(a.value + b.value)


def xr_mul(a: XReal, b: XReal) -> XReal:
    # 0 * inf = 0, checked before the infinite branch
    if a.value == 0.0 or b.value == 0.0:
        return ZERO
    if not (a.is_finite and b.is_finite):
        return INF
    return XReal(a.value * b.value)


def xr_real(a: XReal) -> float:
    """Real projection; maps infinity to 0."""
    return a.value if a.is_finite else 0.0


def xr_le(a: XReal, b: XReal) -> bool:
    return a.value <= b.value


def xr_is_finite(a: XReal) -> bool:
    return a.is_finite


def xr_sum(values: Iterable[XReal]) -> XReal:
    """Infinity-absorbing sum; finite parts are added with ``math.fsum``."""
    finite = []
    for v in values:
        if not v.is_finite:
            return INF
        finite.append(v.value)
    return XReal(math.fsum(finite))
