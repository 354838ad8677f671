"""Auxiliary objectives steering the library search."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from tslg.configs.case import CaseConfig
from tslg.core.ndd import CommonSet
from tslg.core.vehicles import Trajectory, mnp_ettc

from .distance import distance_to_common_set
from .highway import FeasibleZone


def cutin_objective_array(
    mnp: np.ndarray,
    values: np.ndarray,
    omega: CommonSet,
    factors: Mapping[str, float],
    w: float,
) -> np.ndarray:
    """J = mnpETTC + w·d(x, Ω) for rows of scenarios."""
    return np.asarray(mnp) + w * distance_to_common_set(values, omega, factors)


def cutin_objective(
    x: np.ndarray,
    sm_traj: Trajectory,
    omega: CommonSet,
    cfg: CaseConfig,
    factors: Mapping[str, float] | None = None,
) -> float:
    factors = factors or cfg.objective.u_f or {}
    return float(
        cutin_objective_array(
            mnp_ettc(sm_traj, cfg.objective.u_i), x, omega, factors, cfg.objective.w
        )
    )


def highway_objective(
    x: np.ndarray,
    zone: FeasibleZone,
    omega: CommonSet,
    cfg: CaseConfig,
    factors: Mapping[str, float] | None = None,
) -> float:
    """J = S(F)/U_S + w·d(x, Ω)."""
    factors = factors or cfg.objective.u_f or {}
    d = distance_to_common_set(x, omega, factors)
    return zone.area / cfg.objective.u_s + cfg.objective.w * float(d)
