"""Enhanced time to collision and its normalized episode minimum."""

from __future__ import annotations

import numpy as np

from tslg.core.exceptions import DomainError

from .models import Trajectory

CONSTANT_SPEED_TOLERANCE = 1e-6


def ettc_array(r: np.ndarray, r_dot: np.ndarray, u_r: np.ndarray) -> np.ndarray:
    """First positive root of R + Ṙt + u_r t²/2 = 0; NaN where none exists.

    Uses t = 2R / (−Ṙ + √(Ṙ² − 2u_rR)), which equals the textbook root and
    stays accurate for small |u_r|.  Below ``CONSTANT_SPEED_TOLERANCE`` the
    constant-speed TTC −R/Ṙ is used.
    """
    r, r_dot, u_r = np.broadcast_arrays(
        np.asarray(r, dtype=np.float64),
        np.asarray(r_dot, dtype=np.float64),
        np.asarray(u_r, dtype=np.float64),
    )
    disc = r_dot**2 - 2.0 * u_r * r
    denom = -r_dot + np.sqrt(np.maximum(disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        quadratic = np.where((disc >= 0) & (denom > 0), 2.0 * r / denom, np.nan)
        constant = np.where(r_dot < 0, -r / r_dot, np.nan)
    out = np.where(np.abs(u_r) < CONSTANT_SPEED_TOLERANCE, constant, quadratic)
    return np.where(r > 0, out, np.nan)


def ettc(r: float, r_dot: float, u_r: float) -> float | None:
    """Time until R reaches 0 under constant relative acceleration, or ``None``."""
    if r <= 0:
        raise DomainError(f"ETTC needs R > 0, got {r!r}")
    value = float(ettc_array(r, r_dot, u_r))
    return None if np.isnan(value) else value


def np_ettc_array(
    r: np.ndarray, r_dot: np.ndarray, u_r: np.ndarray, u_i: float
) -> np.ndarray:
    """Normalized positive ETTC per sample: ETTC/U_I, 1 where no collision is
    predicted, 0 once the range is gone."""
    t = ettc_array(r, r_dot, u_r)
    out = np.where(np.isnan(t), 1.0, t / u_i)
    out = np.where(np.asarray(r) > 0, out, 0.0)
    return np.clip(out, 0.0, 1.0)


def mnp_ettc(traj: Trajectory, u_i: float) -> float:
    """Minimal normalized positive ETTC over the episode, in [0, 1]."""
    values = np_ettc_array(traj.range, traj.range_rate, traj.relative_acceleration, u_i)
    return float(values.min())
