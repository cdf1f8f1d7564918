"""Bounded-set arithmetic: boxes, strips and constrained zonotopes."""

from .boxes import Box
from .czono import (
    ConstrainedZonotope,
    Strip,
    cz_contains_point,
    cz_diameter_bounds,
    cz_intersect,
    cz_intersect_strip,
    cz_interval_hull,
    cz_is_empty,
    cz_linear_map,
    cz_minkowski_sum,
    cz_sample_point,
    cz_sample_points,
)
from .lp import PIVOT_TOL, BoundedSimplex, lp_feasible, lp_optimize
from .reduction import cz_reduce

__all__ = [
    "Box",
    "BoundedSimplex",
    "ConstrainedZonotope",
    "PIVOT_TOL",
    "Strip",
    "cz_contains_point",
    "cz_diameter_bounds",
    "cz_intersect",
    "cz_intersect_strip",
    "cz_interval_hull",
    "cz_is_empty",
    "cz_linear_map",
    "cz_minkowski_sum",
    "cz_reduce",
    "cz_sample_point",
    "cz_sample_points",
    "lp_feasible",
    "lp_optimize",
]
