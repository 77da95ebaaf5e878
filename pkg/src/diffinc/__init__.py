"""Solver and analyzer toolkit for differential inclusions whose
right-hand sides have compact box-union images."""

from .analyzer import (
    CheckReport,
    CoordinateMonotone,
    GrowthFit,
    check_closed_graph,
    check_trajectory_monotone,
    check_wcm,
    check_wcm_pair,
    estimate_growth,
    find_cyclic_violation,
    find_monotonicity_violation,
    residual,
    wcm_pair_feasible,
)
from .mapdsl import ParseError, load_map, parse_expr, parse_map, roundtrip
from .selector import (
    SelectionPolicy,
    SignPattern,
    WcmInfeasible,
    feasible_region,
    initial_velocity,
    select_velocity,
)
from .setmap import (
    Box,
    CompactSet,
    Expr,
    MapDefinitionError,
    SetValuedMap,
    builtin,
    distance,
    product,
    real_cbrt,
    sup_norm,
    union,
    vertices,
)
from .solver import (
    ConvergenceReport,
    GrowthBounds,
    MeshTooCoarse,
    Trajectory,
    converge,
    euler_polygon,
    gronwall_bounds,
    min_steps,
    trajectory_from_csv,
    trajectory_to_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "CheckReport",
    "CompactSet",
    "ConvergenceReport",
    "CoordinateMonotone",
    "Expr",
    "GrowthBounds",
    "GrowthFit",
    "MapDefinitionError",
    "MeshTooCoarse",
    "ParseError",
    "SelectionPolicy",
    "SetValuedMap",
    "SignPattern",
    "Trajectory",
    "WcmInfeasible",
    "builtin",
    "check_closed_graph",
    "check_trajectory_monotone",
    "check_wcm",
    "check_wcm_pair",
    "converge",
    "distance",
    "estimate_growth",
    "euler_polygon",
    "feasible_region",
    "find_cyclic_violation",
    "find_monotonicity_violation",
    "gronwall_bounds",
    "initial_velocity",
    "load_map",
    "min_steps",
    "parse_expr",
    "parse_map",
    "product",
    "real_cbrt",
    "residual",
    "roundtrip",
    "select_velocity",
    "sup_norm",
    "trajectory_from_csv",
    "trajectory_to_csv",
    "union",
    "vertices",
    "wcm_pair_feasible",
]
