"""Collision, dangerous and safe zones of the car-following state grid."""

from __future__ import annotations

import logging

import numpy as np

from tslg.configs.case import CaseConfig
from tslg.core.scenario import (
    ZONE_COLLISION,
    ZONE_DANGEROUS,
    ZONE_SAFE,
    ScenarioSpace,
)
from tslg.core.vehicles import Follower, worst_case_collides
from tslg.infra.telemetry import ATTR_DANGEROUS, SPAN_RL_ZONES, tracer

logger = logging.getLogger(__name__)


def classify_zones(
    space: ScenarioSpace, follower: Follower, config: CaseConfig
) -> np.ndarray:
    """Zone label per state.

    Collision: R ≤ d_acci.  Safe: sustained worst-case lead braking never
    produces a collision within the horizon.  Dangerous: the rest.
    """
    values = space.all_values()
    r = values[:, space.dim_index("range")]
    zones = np.full(space.total_count, ZONE_SAFE, dtype=np.int8)
    collision = r <= config.surrogate.d_acci
    zones[collision] = ZONE_COLLISION

    with tracer.start_as_current_span(SPAN_RL_ZONES) as span:
        rest = np.flatnonzero(~collision)
        hit = worst_case_collides(values[rest], follower, config)
        zones[rest[hit]] = ZONE_DANGEROUS
        n_dangerous = int(hit.sum())
        span.set_attribute(ATTR_DANGEROUS, n_dangerous)

    logger.info(
        "Zones: %d collision, %d dangerous (%.1f%%), %d safe.",
        int(collision.sum()),
        n_dangerous,
        100.0 * n_dangerous / space.total_count,
        int((zones == ZONE_SAFE).sum()),
    )
    return zones
