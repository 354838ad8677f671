"""Episode simulation.

Kinematics are forward Euler at ``SimulationConfig.dt``: positions advance
with the current speed, then speeds take the commanded acceleration and
are clipped to the vehicle's box.  Batch kernels run a whole array of
scenarios in lock step; the single-episode entry point records the full
trajectory.
"""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from tslg.configs.case import CaseConfig, CaseId
from tslg.core.exceptions import DomainError

from .ettc import np_ettc_array
from .followers import Follower, get_follower
from .models import ActionBranch, Trajectory

logger = logging.getLogger(__name__)


class _Pair:
    """Follower/lead pair state for a batch of episodes."""

    def __init__(
        self,
        follower: Follower,
        lead_speed: np.ndarray,
        gap: np.ndarray,
        follow_speed: np.ndarray,
        lead_box: tuple[float, float],
    ) -> None:
        box = follower.bounds
        self.follower = follower
        self.lead_box = lead_box
        self.pe = np.zeros_like(gap, dtype=np.float64)
        self.pl = np.array(gap, dtype=np.float64)
        self.vl = np.array(lead_speed, dtype=np.float64)
        speed = np.asarray(follow_speed, dtype=np.float64)
        self.ve = np.clip(speed, box.v_min, box.v_max)
        self.ae = np.zeros_like(self.pe)
        self.al = np.zeros_like(self.pe)

    @property
    def r(self) -> np.ndarray:
        return self.pl - self.pe

    @property
    def r_dot(self) -> np.ndarray:
        return self.vl - self.ve

    def command(self, lead_accel: np.ndarray) -> None:
        lead_accel = np.asarray(lead_accel, dtype=np.float64)
        self.al = np.broadcast_to(lead_accel, self.pe.shape)
        self.ae = self.follower.accel(self.ve, self.ae, self.r, self.r_dot, self.al)

    def advance(self, dt: float, active: np.ndarray) -> None:
        box = self.follower.bounds
        self.pe = np.where(active, self.pe + self.ve * dt, self.pe)
        self.pl = np.where(active, self.pl + self.vl * dt, self.pl)
        self.ve = np.where(
            active, np.clip(self.ve + self.ae * dt, box.v_min, box.v_max), self.ve
        )
        self.vl = np.where(
            active, np.clip(self.vl + self.al * dt, *self.lead_box), self.vl
        )


class CutinOutcome(BaseModel):
    """Per-scenario results of a batch of cut-in episodes."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    accident: np.ndarray
    mnp_ettc: np.ndarray


def _steps(duration: float, dt: float) -> int:
    return max(1, round(duration / dt))


def rollout_cutin(
    values: np.ndarray, follower: Follower, config: CaseConfig
) -> CutinOutcome:
    """Cut-in episodes for rows of (R, Ṙ).

    The lead appears at range R with speed v_ego + Ṙ and holds it.
    """
    pts = np.atleast_2d(np.asarray(values, dtype=np.float64))
    sim = config.simulation
    d_acci = config.surrogate.d_acci
    ego_speed = np.full(len(pts), sim.ego_speed)
    pair = _Pair(follower, ego_speed + pts[:, 1], pts[:, 0], ego_speed, (0.0, np.inf))
    active = np.ones(len(pts), dtype=bool)
    accident = np.zeros(len(pts), dtype=bool)
    mnp = np.ones(len(pts))
    u_i = config.objective.u_i
    zero = np.zeros(len(pts))

    for k in range(_steps(sim.horizon, sim.dt) + 1):
        hit = active & (pair.r < d_acci)
        accident |= hit
        pair.command(zero)
        sample = np_ettc_array(pair.r, pair.r_dot, pair.al - pair.ae, u_i)
        mnp = np.where(active, np.minimum(mnp, sample), mnp)
        mnp = np.where(hit, 0.0, mnp)
        active &= ~hit
        if not active.any() or k == _steps(sim.horizon, sim.dt):
            break
        pair.advance(sim.dt, active)
    return CutinOutcome(accident=accident, mnp_ettc=mnp)


def epoch_transition(
    states: np.ndarray, lead_accel: np.ndarray, follower: Follower, config: CaseConfig
) -> tuple[np.ndarray, np.ndarray]:
    """One decision epoch from rows of (v_BV, R, Ṙ) under held lead
    accelerations.  Returns the continuous next states and the collision
    flags (R < d_acci at any substep)."""
    pts = np.atleast_2d(np.asarray(states, dtype=np.float64))
    sim, mdp = config.simulation, config.mdp
    d_acci = config.surrogate.d_acci
    v_bv, r, r_dot = pts.T
    pair = _Pair(follower, v_bv, r, v_bv - r_dot, (mdp.lead_v_min, mdp.lead_v_max))
    active = np.ones(len(pts), dtype=bool)
    collided = np.zeros(len(pts), dtype=bool)
    for _ in range(_steps(sim.epoch, sim.dt)):
        hit = active & (pair.r < d_acci)
        collided |= hit
        active &= ~hit
        pair.command(lead_accel)
        pair.advance(sim.dt, active)
    collided |= active & (pair.r < d_acci)
    return np.column_stack([pair.vl, pair.r, pair.r_dot]), collided


def worst_case_collides(
    states: np.ndarray, follower: Follower, config: CaseConfig
) -> np.ndarray:
    """Whether sustained worst-case lead braking from each state ever
    produces a collision within the horizon (continuous, no re-discretization)."""
    pts = np.atleast_2d(np.asarray(states, dtype=np.float64))
    mdp = config.mdp
    collided = np.zeros(len(pts), dtype=bool)
    brake = np.full(len(pts), mdp.worst_case_action)
    current = pts
    for _ in range(mdp.horizon):
        current, hit = epoch_transition(current, brake, follower, config)
        collided |= hit
        if collided.all():
            break
    return collided


# ---------------------------------------------------------------------------
# Single episodes
# ---------------------------------------------------------------------------


def _in_safe_zone(pair: _Pair, surrogate: Follower, config: CaseConfig) -> bool:
    """Safe-zone test of the current car-following state: beyond the range
    grid, or clear of collision under sustained worst-case lead braking."""
    r_max = next(d.upper for d in config.space if d.name == "range")
    r = float(pair.r[0])
    if r > r_max:
        return True
    if r <= config.surrogate.d_acci:
        return False
    state = np.array([[pair.vl[0], r, pair.r_dot[0]]])
    return not bool(worst_case_collides(state, surrogate, config)[0])


def _record(
    pair: _Pair,
    schedule: list[float],
    config: CaseConfig,
    truncated_at_end: bool,
    safe_every: int | None = None,
) -> Trajectory:
    """Run *schedule* on *pair*; with *safe_every*, stop at the first
    boundary of that many samples whose state is in the safe zone."""
    dt = config.simulation.dt
    d_acci = config.surrogate.d_acci
    surrogate = get_follower("idm", config) if safe_every else None
    series: dict[str, list[float]] = {k: [] for k in (
        "ego_position", "ego_velocity", "ego_acceleration",
        "lead_position", "lead_velocity", "lead_acceleration",
    )}
    active = np.ones(1, dtype=bool)
    accident_index = None
    safe = False
    for k, lead_accel in enumerate([*schedule, schedule[-1]]):
        pair.command(np.array([lead_accel]))
        for name, value in (
            ("ego_position", pair.pe), ("ego_velocity", pair.ve),
            ("ego_acceleration", pair.ae), ("lead_position", pair.pl),
            ("lead_velocity", pair.vl), ("lead_acceleration", pair.al),
        ):
            series[name].append(float(value[0]))
        if pair.r[0] < d_acci:
            accident_index = k
            break
        if surrogate is not None and k % safe_every == 0:
            safe = _in_safe_zone(pair, surrogate, config)
            if safe:
                break
        if k == len(schedule):
            break
        pair.advance(dt, active)
    return Trajectory(
        dt=dt,
        accident_index=accident_index,
        entered_safe_zone=safe,
        truncated=accident_index is None and not safe and truncated_at_end,
        **{k: np.array(v) for k, v in series.items()},
    )


def simulate_episode(
    x: np.ndarray | ActionBranch, follower: str, config: CaseConfig
) -> Trajectory:
    """Trajectory of one scenario.

    Cut-in scenarios are (R, Ṙ) values.  Car-following scenarios are an
    ``ActionBranch`` whose actions are held for one epoch each.  The episode
    stops at the first accident sample; a car-following episode also stops
    at the first epoch boundary, the start included, whose state is in the
    safe zone of the IDM surrogate.
    """
    model = get_follower(follower, config)
    sim = config.simulation
    if config.case is CaseId.CUTIN:
        r, r_dot = np.asarray(x, dtype=np.float64).reshape(2)
        if r <= 0:
            raise DomainError(f"cut-in range must be positive, got {r!r}")
        pair = _Pair(
            model, np.array([sim.ego_speed + r_dot]), np.array([r]),
            np.array([sim.ego_speed]), (0.0, np.inf),
        )
        schedule = [0.0] * _steps(sim.horizon, sim.dt)
        return _record(pair, schedule, config, truncated_at_end=True)
    if config.case is CaseId.CAR_FOLLOWING:
        if not isinstance(x, ActionBranch):
            raise DomainError("car-following episodes need an ActionBranch")
        v_bv, r, r_dot = x.state
        mdp = config.mdp
        pair = _Pair(
            model, np.array([v_bv]), np.array([r]), np.array([v_bv - r_dot]),
            (mdp.lead_v_min, mdp.lead_v_max),
        )
        per_epoch = _steps(sim.epoch, sim.dt)
        schedule = [u for u in x.actions for _ in range(per_epoch)]
        return _record(
            pair, schedule, config,
            truncated_at_end=len(x.actions) >= mdp.horizon,
            safe_every=per_epoch,
        )
    raise DomainError(f"no single-episode simulator for case {config.case}")
