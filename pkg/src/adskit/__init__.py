"""Exact linear algebra for SO(q,2): the Lie algebra, group charts on AdS_{q+1},
and differential-operator realizations on the bulk and on the conformal boundary."""

from .decomp import BulkPoint, NotInCell, bruhat_factorize, sekiguchi_factorize
from .grp import GroupElement
from .liealg import AlgebraElement, WeightLabel, bracket, generator
from .reps import Realization

__all__ = [
    "AlgebraElement",
    "BulkPoint",
    "GroupElement",
    "NotInCell",
    "Realization",
    "WeightLabel",
    "bracket",
    "bruhat_factorize",
    "generator",
    "sekiguchi_factorize",
]
__version__ = "0.1.0"
