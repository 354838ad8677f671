"""Synthetic naturalistic data.

Stands in for proprietary field databases.  The parametric forms are fixed
by ``NddConfig`` so every downstream number is reproducible from a seed:

* cut-in: a four-component Gaussian mixture over (R, Ṙ), truncated to the
  query bounds.  The dominant component puts the mode cell at R = 14 m,
  Ṙ = 0 (the half-open bin (12, 14]).  A small component at R ≈ 6 m,
  Ṙ ≈ −8 m/s carries the close, fast-closing tail where the surrogate
  collides.
* car-following points: truncated-normal lead speed, normal range rate,
  log-normal time headway.
* free driving: truncated-normal speed and an acceleration drawn from a
  normal centered at 0, truncated to the action bounds and rounded to the
  action grid.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.stats import truncnorm

from tslg.configs.case import CaseConfig, CaseId, NddConfig
from tslg.core.exceptions import DomainError
from tslg.infra.telemetry import ATTR_CASE, ATTR_EVENT_COUNT, SPAN_NDD_SYNTH, tracer

from .events import EventBatch

logger = logging.getLogger(__name__)

_MAX_GAP = 300.0


def _truncated_normal(
    rng: np.random.Generator,
    mean: float,
    std: float,
    bounds: tuple[float, float],
    size: int,
) -> np.ndarray:
    a, b = ((bounds[0] - mean) / std, (bounds[1] - mean) / std)
    return truncnorm.rvs(a, b, loc=mean, scale=std, size=size, random_state=rng)


def _cutin_events(ndd: NddConfig, ego_speed: float, n: int, rng: np.random.Generator):
    weights = np.array([c.weight for c in ndd.cutin_mixture])
    weights /= weights.sum()
    means = np.array([c.mean for c in ndd.cutin_mixture])
    stds = np.array([c.std for c in ndd.cutin_mixture])
    r_lo, r_hi = ndd.cutin_range
    v_lo, v_hi = ndd.cutin_speed

    chunks: list[np.ndarray] = []
    kept = 0
    while kept < n:
        size = 2 * (n - kept) + 64
        comp = rng.choice(len(weights), size=size, p=weights)
        draws = means[comp] + stds[comp] * rng.standard_normal((size, 2))
        speed = ego_speed + draws[:, 1]
        ok = (
            (draws[:, 0] > r_lo) & (draws[:, 0] < r_hi)
            & (speed > v_lo) & (speed < v_hi)
        )
        chunks.append(draws[ok])
        kept += int(ok.sum())
    return np.concatenate(chunks)[:n]


def _trajectory_events(ndd: NddConfig, n: int, rng: np.random.Generator):
    lo, hi = ndd.speed_bounds
    chunks: list[np.ndarray] = []
    kept = 0
    while kept < n:
        size = 2 * (n - kept) + 64
        v_lead = _truncated_normal(rng, ndd.speed_mean, ndd.speed_std, (lo, hi), size)
        r_dot = ndd.range_rate_std * rng.standard_normal(size)
        v_follow = v_lead - r_dot
        headway = np.exp(ndd.headway_log_mean + ndd.headway_log_std
                         * rng.standard_normal(size))
        gap = headway * v_follow
        ok = (v_follow >= lo) & (v_follow <= hi) & (gap > 0) & (gap <= _MAX_GAP)
        chunks.append(np.column_stack([v_lead, gap, v_follow])[ok])
        kept += int(ok.sum())
    return np.concatenate(chunks)[:n]


def _free_driving_events(ndd: NddConfig, n: int, rng: np.random.Generator):
    v = _truncated_normal(rng, ndd.speed_mean, ndd.speed_std, ndd.speed_bounds, n)
    u = _truncated_normal(rng, 0.0, ndd.action_std, ndd.action_bounds, n)
    u = np.clip(np.rint(u / ndd.action_step) * ndd.action_step, *ndd.action_bounds)
    return np.column_stack([v, u])


def synth_events(case: CaseConfig, n: int, seed: int) -> EventBatch:
    """Draw *n* events for *case* (cut-in moments, or car-following points
    plus *n* free-driving pairs).  Deterministic for a fixed seed."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    with tracer.start_as_current_span(SPAN_NDD_SYNTH) as span:
        span.set_attribute(ATTR_CASE, case.case.value)
        span.set_attribute(ATTR_EVENT_COUNT, n)
        if case.case is CaseId.CUTIN:
            batch = EventBatch(
                case=case.case,
                cutin=_cutin_events(case.ndd, case.simulation.ego_speed, n, rng),
            )
        else:
            trajectory = _trajectory_events(case.ndd, n, rng)
            free = (
                _free_driving_events(case.ndd, n, rng)
                if case.case is CaseId.CAR_FOLLOWING
                else None
            )
            batch = EventBatch(case=case.case, trajectory=trajectory, free_driving=free)
    logger.info("Synthesized %d %s events (seed=%d).", len(batch), case.case, seed)
    return batch
