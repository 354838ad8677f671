from .criticality import criticality, gamma_threshold
from .distance import distance_to_common_set
from .highway import (
    ExitOutcome,
    FeasibleZone,
    bv_trajectories,
    cav_exit_attempt,
    exit_failures,
    feasible_zone,
    feasible_zone_for,
    gap_safe,
    reach_band,
    sm_exit_attempt,
)
from .objective import cutin_objective, cutin_objective_array, highway_objective
from .search import neighbor_cells, search_library

__all__ = [
    "ExitOutcome",
    "FeasibleZone",
    "bv_trajectories",
    "cav_exit_attempt",
    "criticality",
    "cutin_objective",
    "cutin_objective_array",
    "distance_to_common_set",
    "exit_failures",
    "feasible_zone",
    "feasible_zone_for",
    "gamma_threshold",
    "gap_safe",
    "highway_objective",
    "neighbor_cells",
    "reach_band",
    "search_library",
    "sm_exit_attempt",
]
