"""Intelligent driver model.

Range R runs from the follower's front bumper to the lead's front bumper,
so the bumper gap is R − L_IDM.  The range rate Ṙ is lead speed minus
follower speed (negative when closing).
"""

from __future__ import annotations

import numpy as np

from tslg.configs.case import IdmParams

from .models import VehicleState


def desired_gap(speed: np.ndarray, r_dot: np.ndarray, p: IdmParams) -> np.ndarray:
    """s* = s0 + max(0, vT − vṘ/(2√(αb)))."""
    dynamic = speed * p.headway - speed * r_dot / (2.0 * np.sqrt(p.alpha * p.b))
    return p.s0 + np.maximum(dynamic, 0.0)


def idm_accel_array(
    speed: np.ndarray, r: np.ndarray, r_dot: np.ndarray, p: IdmParams
) -> np.ndarray:
    """Vectorized IDM acceleration, clamped to [a_min, a_max].

    A nonpositive bumper gap saturates at a_min; the caller decides whether
    that is an accident.
    """
    speed = np.asarray(speed, dtype=np.float64)
    gap = np.asarray(r, dtype=np.float64) - p.length
    safe_gap = np.where(gap > 0, gap, 1.0)
    s_star = desired_gap(speed, np.asarray(r_dot, dtype=np.float64), p)
    free = 1.0 - (np.maximum(speed, 0.0) / p.beta) ** p.c
    accel = p.alpha * (free - (s_star / safe_gap) ** 2)
    accel = np.where(gap > 0, accel, p.a_min)
    return np.clip(accel, p.a_min, p.a_max)


def idm_accel(ego: VehicleState | float, r: float, r_dot: float, p: IdmParams) -> float:
    speed = ego.velocity if isinstance(ego, VehicleState) else ego
    accel = idm_accel_array(np.float64(speed), np.float64(r), np.float64(r_dot), p)
    return float(accel)
