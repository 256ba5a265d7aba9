"""Numerical laboratory for the Daugavet equation of bounded nonlinear maps."""

from . import spaces, maps, optim
from .errors import LabError
from .spaces import SupNorm, LpNorm, WeightedL1, DirectSumL1, UnitScalarGrid
from .maps import make_map, rank_one, compose_linear, normalized_functional
from .optim import sup_norm, sup_on_slice, defect, alt_defect, Region

__version__ = "0.1.0"
