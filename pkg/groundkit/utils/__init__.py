"""
Utilities package for GROUNDKIT
"""

from .geometry import (
    iou,
    nms,
    position_feature,
    spatial_pair_feature,
    union_hull,
)
from .logger import get_logger, setup_logging
from .optimize import NelderMeadResult, nelder_mead
from .sanitizer import KeySanitizer, PairKeyBuilder, parse_pair_key
from .validator import BundleValidator
from .workers import map_ordered

__all__ = [
    "iou",
    "nms",
    "position_feature",
    "spatial_pair_feature",
    "union_hull",
    "get_logger",
    "setup_logging",
    "NelderMeadResult",
    "nelder_mead",
    "KeySanitizer",
    "PairKeyBuilder",
    "parse_pair_key",
    "BundleValidator",
    "map_ordered",
]
