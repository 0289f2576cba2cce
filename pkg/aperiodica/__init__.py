from aperiodica.discrepancy import DiscrepancyReport, discrepancy_report, van_hove_check
from aperiodica.errors import AperiodicaError, InternalInvariantError, InvalidParameterError, NotFoundError
from aperiodica.geometry import Box, Region, tube_measure
from aperiodica.hullbuilder import PatchTower, WordPrefix, build_tower, distinguish, emit_hull_element
from aperiodica.matcher import MatchInstance, bottleneck_match, non_bd_ratio
from aperiodica.pointsets import PointSource, build_source
from aperiodica.scalar import PHI, QuadNum
from aperiodica.search import find_deviant, find_opposite_translate, find_shift_robust_deviant

__version__ = "0.1.0"

__all__ = [
    "QuadNum",
    "PHI",
    "Box",
    "Region",
    "tube_measure",
    "PointSource",
    "build_source",
    "DiscrepancyReport",
    "discrepancy_report",
    "van_hove_check",
    "MatchInstance",
    "bottleneck_match",
    "non_bd_ratio",
    "find_deviant",
    "find_opposite_translate",
    "find_shift_robust_deviant",
    "PatchTower",
    "WordPrefix",
    "build_tower",
    "distinguish",
    "emit_hull_element",
    "AperiodicaError",
    "InvalidParameterError",
    "NotFoundError",
    "InternalInvariantError",
]
