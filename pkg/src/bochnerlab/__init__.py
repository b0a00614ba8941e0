"""Constructive Bochner integration at desk scale."""

from .extreal import INF, ZERO, XReal
from .spaces import FiniteSpace, IntervalSet, IntervalSpace, PointSet
from .vectors import COMPLEX, REAL, RVec, Vector

__version__ = "0.1.0"
