"""Highway-exit geometry: background-vehicle motion, the feasible lane-change
zone and the exit planners of the surrogate and of the CAV under test.

The CAV starts at ``p0`` with speed ``v0`` and must merge into the target
lane, where the two background vehicles (BVs) drive, before the exit at
``exit_position``.  A lane-change candidate is a (time, position) pair.

Gap safety is checked at the lane-change instant only: the clearance
(bumper to bumper) to every BV must be positive, and where the rear vehicle
is faster the time to collision, clearance / (v_rear − v_front), must be at
least ``t_min``.  An opening gap carries no time constraint.
"""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import ndimage

from tslg.configs.case import CaseConfig, HighwayConfig
from tslg.core.exceptions import DomainError
from tslg.core.vehicles import idm_accel_array, mobil_utility

logger = logging.getLogger(__name__)

_BAND_TOLERANCE = 1e-9
_FREE_ROAD = 1e6
_GAP_SAMPLES = 201


def time_grid(hw: HighwayConfig) -> np.ndarray:
    return np.arange(round(hw.t_max / hw.dt) + 1) * hw.dt


def position_grid(hw: HighwayConfig) -> np.ndarray:
    return np.arange(round((hw.exit_position - hw.p0) / hw.dp) + 1) * hw.dp + hw.p0


def bvs_from_scenario(x: np.ndarray) -> np.ndarray:
    """Rows of (position, speed) from (p1, v1, p2, v2)."""
    return np.asarray(x, dtype=np.float64).reshape(-1, 2)


def bv_trajectories(
    bvs: np.ndarray, hw: HighwayConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Positions and speeds of the BVs on the time grid; shape (T, k).

    BVs hold their speed except that a follower closing to within ``d_cf``
    of the BV ahead takes over its speed.
    """
    bvs = np.asarray(bvs, dtype=np.float64).reshape(-1, 2)
    steps = len(time_grid(hw))
    pos = np.empty((steps, len(bvs)))
    vel = np.empty((steps, len(bvs)))
    p, v = bvs[:, 0].copy(), bvs[:, 1].copy()
    # stable sort: on equal positions the first BV leads
    order = np.argsort(-p, kind="stable")
    for k in range(steps):
        for front, rear in zip(order[:-1], order[1:], strict=True):
            gap = p[front] - p[rear] - hw.vehicle_length
            if gap <= hw.d_cf and v[rear] > v[front]:
                v[rear] = v[front]
        pos[k], vel[k] = p, v
        p = p + v * hw.dt
    return pos, vel


def _travel(t: np.ndarray, v0: float, a: float, v_lim: float) -> np.ndarray:
    """Distance covered accelerating at *a* until *v_lim*, then cruising."""
    t = np.asarray(t, dtype=np.float64)
    if a == 0 or (v_lim - v0) / a <= 0:
        speed = v0 if a == 0 else v_lim
        return speed * t
    t_sat = (v_lim - v0) / a
    ramp = v0 * t + 0.5 * a * t**2
    cruise = v0 * t_sat + 0.5 * a * t_sat**2 + v_lim * (t - t_sat)
    return np.where(t <= t_sat, ramp, cruise)


def _speed_after(t: np.ndarray, v0: float, a: float, hw: HighwayConfig) -> np.ndarray:
    return np.clip(v0 + a * np.asarray(t, dtype=np.float64), hw.v_min, hw.v_max)


def _start_speed(hw: HighwayConfig) -> float:
    return float(np.clip(hw.v0, hw.v_min, hw.v_max))


def reach_band(t: np.ndarray, hw: HighwayConfig) -> tuple[np.ndarray, np.ndarray]:
    """Earliest/latest-position envelope of the CAV under bang-bang control."""
    v0 = _start_speed(hw)
    lo = hw.p0 + _travel(t, v0, hw.a_min, hw.v_min)
    hi = hw.p0 + _travel(t, v0, hw.a_max, hw.v_max)
    return lo, hi


def gap_safe(
    p: np.ndarray,
    v: np.ndarray,
    bv_pos: np.ndarray,
    bv_vel: np.ndarray,
    length: float,
    t_min: float,
) -> np.ndarray:
    """Per-candidate safety against every BV (last axis of the BV arrays)."""
    p = np.asarray(p)[..., None]
    v = np.asarray(v)[..., None]
    ahead = bv_pos > p
    clearance = np.abs(p - bv_pos) - length
    closing = np.where(ahead, v - bv_vel, bv_vel - v)
    with np.errstate(divide="ignore", invalid="ignore"):
        ttc = np.where(closing > 0, clearance / closing, np.inf)
    ok = (clearance > 0) & (ttc >= t_min)
    return ok.all(axis=-1)


def _implied_speed(t: np.ndarray, p: np.ndarray, hw: HighwayConfig) -> np.ndarray:
    """Speed at (t, p) under the constant acceleration that reaches p at t."""
    v0 = _start_speed(hw)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(t > 0, 2.0 * (p - hw.p0) / t - v0, v0)
    return np.clip(v, hw.v_min, hw.v_max)


def _open_gaps(
    times: np.ndarray, bv_pos: np.ndarray, bv_vel: np.ndarray, hw: HighwayConfig
) -> np.ndarray:
    """Whether each gap (by BVs ahead) holds a safe reachable position at
    each instant; shape (T, k + 1).

    The reach band is sampled at ``_GAP_SAMPLES`` points, independent of
    the position grid.
    """
    lo, hi = reach_band(times, hw)
    hi = np.minimum(hi, hw.exit_position)
    p = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, _GAP_SAMPLES)
    v = _implied_speed(times[:, None], p, hw)
    bp, bvv = bv_pos[:, None, :], bv_vel[:, None, :]
    safe = gap_safe(p, v, bp, bvv, hw.vehicle_length, hw.t_min)
    safe &= (hi >= lo - _BAND_TOLERANCE)[:, None]
    ahead = (bp > p[..., None]).sum(axis=-1)
    return np.stack(
        [(safe & (ahead == s)).any(axis=1) for s in range(bv_pos.shape[1] + 1)],
        axis=1,
    )


def _label_components(
    feasible: np.ndarray, slots: np.ndarray, open_gaps: np.ndarray
) -> np.ndarray:
    """Component label per grid cell, 0 where infeasible.

    A component is one gap over a maximal run of instants during which it
    stays open, restricted to the feasible cells it holds.
    """
    labels = np.zeros(feasible.shape, dtype=np.int64)
    count = 0
    for slot in range(open_gaps.shape[1]):
        cells = feasible & (slots == slot)
        runs, n_runs = ndimage.label(open_gaps[:, slot] | cells.any(axis=1))
        for run in range(1, n_runs + 1):
            member = cells & (runs == run)[:, None]
            if member.any():
                count += 1
                labels[member] = count
    return labels


class FeasibleZone(BaseModel):
    """Feasible lane-change candidates on the (time, position) grid.

    Every feasible cell is a task solution of difficulty −1, so the summed
    difficulty is −S(F).  ``slots`` holds the gap of each cell (the number
    of BVs ahead of the CAV after merging) and ``labels`` its connected
    component.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    positions: np.ndarray
    feasible: np.ndarray
    slots: np.ndarray
    labels: np.ndarray
    cell_area: float

    @property
    def count(self) -> int:
        return int(self.feasible.sum())

    @property
    def area(self) -> float:
        """S(F) in m·s."""
        return self.count * self.cell_area

    @property
    def difficulty(self) -> float:
        return -self.area

    @property
    def empty(self) -> bool:
        return self.count == 0

    @property
    def component_count(self) -> int:
        return int(self.labels.max(initial=0))

    @property
    def component_slots(self) -> tuple[int, ...]:
        """Gap of each component, in label order."""
        return tuple(
            int(self.slots[self.labels == label][0])
            for label in range(1, self.component_count + 1)
        )


def feasible_zone_for(bvs: np.ndarray, hw: HighwayConfig) -> FeasibleZone:
    """Zone for an explicit BV list (possibly empty)."""
    times = time_grid(hw)
    positions = position_grid(hw)
    t, p = np.meshgrid(times, positions, indexing="ij")
    lo, hi = reach_band(t, hw)
    reach = (p >= lo - _BAND_TOLERANCE) & (p <= hi + _BAND_TOLERANCE)
    reach &= p <= hw.exit_position + _BAND_TOLERANCE
    v = _implied_speed(t, p, hw)

    bv_pos, bv_vel = bv_trajectories(bvs, hw)
    bp = bv_pos[:, None, :]
    bvv = bv_vel[:, None, :]
    feasible = reach & gap_safe(p, v, bp, bvv, hw.vehicle_length, hw.t_min)
    slots = (bp > p[..., None]).sum(axis=-1)
    return FeasibleZone(
        times=times,
        positions=positions,
        feasible=feasible,
        slots=slots,
        labels=_label_components(
            feasible, slots, _open_gaps(times, bv_pos, bv_vel, hw)
        ),
        cell_area=hw.dt * hw.dp,
    )


def feasible_zone(x: np.ndarray, cfg: CaseConfig) -> FeasibleZone:
    """Zone of highway scenario x = (p1, v1, p2, v2)."""
    return feasible_zone_for(bvs_from_scenario(x), cfg.highway)


# ---------------------------------------------------------------------------
# Exit planners
# ---------------------------------------------------------------------------


class ExitOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    success: bool
    acceleration: float | None = None
    time: float | None = None
    position: float | None = None
    utility: float | None = None


def _lane_accel(
    speed: np.ndarray, gap: np.ndarray, r_dot: np.ndarray, hw: HighwayConfig
) -> np.ndarray:
    return idm_accel_array(speed, gap, r_dot, hw.lane_idm)


def _merge_utilities(
    p: np.ndarray,
    v: np.ndarray,
    bv_pos: np.ndarray,
    bv_vel: np.ndarray,
    hw: HighwayConfig,
) -> np.ndarray:
    """MOBIL utility of merging at each candidate (no follower in the
    current lane, so the old-follower terms vanish)."""
    utilities = np.empty(len(p))
    for i in range(len(p)):
        bp, bv = bv_pos[i], bv_vel[i]
        ahead = bp > p[i]
        own_before = _lane_accel(v[i], _FREE_ROAD, 0.0, hw)
        if ahead.any():
            lead = np.flatnonzero(ahead)[np.argmin(bp[ahead])]
            own_after = _lane_accel(v[i], bp[lead] - p[i], bv[lead] - v[i], hw)
        else:
            own_after = own_before
        new_before = new_after = 0.0
        if (~ahead).any():
            behind = np.flatnonzero(~ahead)
            fol = behind[np.argmax(bp[behind])]
            others = np.flatnonzero(bp > bp[fol])
            if others.size:
                lead = others[np.argmin(bp[others])]
                new_before = _lane_accel(
                    bv[fol], bp[lead] - bp[fol], bv[lead] - bv[fol], hw
                )
            else:
                new_before = _lane_accel(bv[fol], _FREE_ROAD, 0.0, hw)
            new_after = _lane_accel(bv[fol], p[i] - bp[fol], v[i] - bv[fol], hw)
        utilities[i] = mobil_utility(
            float(own_after), float(own_before),
            float(new_after), float(new_before),
            0.0, 0.0, hw.politeness,
        )
    return utilities


def _exit_attempt(
    bvs: np.ndarray,
    hw: HighwayConfig,
    accelerations: tuple[float, ...],
    t_min: float,
    reaction_time: float,
    rank: bool,
) -> ExitOutcome:
    times = time_grid(hw)
    times = times[times >= reaction_time - _BAND_TOLERANCE]
    index = np.searchsorted(time_grid(hw), times - _BAND_TOLERANCE)
    bv_pos, bv_vel = bv_trajectories(bvs, hw)
    v0 = _start_speed(hw)

    rows_a, rows_t, rows_p, rows_v, rows_k = [], [], [], [], []
    for a in accelerations:
        v_lim = hw.v_max if a > 0 else hw.v_min
        p = hw.p0 + _travel(times, v0, a, v_lim)
        rows_a.append(np.full(len(times), a))
        rows_t.append(times)
        rows_p.append(p)
        rows_v.append(_speed_after(times, v0, a, hw))
        rows_k.append(index)
    a_all, t_all, p_all, v_all, k_all = (
        np.concatenate(r) for r in (rows_a, rows_t, rows_p, rows_v, rows_k)
    )
    ok = p_all <= hw.exit_position + _BAND_TOLERANCE
    ok &= gap_safe(p_all, v_all, bv_pos[k_all], bv_vel[k_all], hw.vehicle_length, t_min)
    if not ok.any():
        return ExitOutcome(success=False)
    cand = np.flatnonzero(ok)
    if not rank:
        first = cand[0]
        return ExitOutcome(
            success=True,
            acceleration=float(a_all[first]),
            time=float(t_all[first]),
            position=float(p_all[first]),
        )
    utility = _merge_utilities(p_all[cand], v_all[cand], bv_pos[k_all[cand]],
                               bv_vel[k_all[cand]], hw)
    best = cand[int(np.argmax(utility))]
    return ExitOutcome(
        success=True,
        acceleration=float(a_all[best]),
        time=float(t_all[best]),
        position=float(p_all[best]),
        utility=float(utility.max()),
    )


def sm_exit_attempt(x: np.ndarray, cfg: CaseConfig, rank: bool = True) -> ExitOutcome:
    """Surrogate planner: constant-acceleration profiles held until each
    candidate time, best MOBIL utility among the safe candidates.

    With ``rank=False`` only the outcome is decided and the earliest safe
    candidate is reported.
    """
    hw = cfg.highway
    return _exit_attempt(
        bvs_from_scenario(x), hw, hw.sm_accelerations, hw.t_min, 0.0, rank
    )


def cav_exit_attempt(x: np.ndarray, cfg: CaseConfig, rank: bool = True) -> ExitOutcome:
    """Vehicle under test: fewer profiles, a larger gap requirement and no
    lane change before its reaction time."""
    hw = cfg.highway
    return _exit_attempt(
        bvs_from_scenario(x), hw, hw.cav_accelerations, hw.cav_t_min,
        hw.cav_reaction_time, rank,
    )


def exit_failures(
    values: np.ndarray, cfg: CaseConfig, planner: str = "sm"
) -> np.ndarray:
    """Failure indicator of *planner* ("sm" or "cav") for rows of scenarios."""
    if planner not in ("sm", "cav"):
        raise DomainError(f"unknown exit planner {planner!r}")
    attempt = sm_exit_attempt if planner == "sm" else cav_exit_attempt
    rows = np.atleast_2d(values)
    return np.array([not attempt(x, cfg, rank=False).success for x in rows])
