"""Exposure models from event counts."""

from __future__ import annotations

import logging

import numpy as np

from tslg.configs.case import DimensionSpec
from tslg.core.exceptions import DomainError, EmptyInputError
from tslg.core.scenario import ExposureModel, ScenarioSpace
from tslg.infra.telemetry import (
    ATTR_CASE,
    ATTR_EVENT_COUNT,
    ATTR_REJECTED,
    SPAN_NDD_HISTOGRAM,
    tracer,
)

from .events import EventBatch

logger = logging.getLogger(__name__)

# Car-following point grid feeding the highway exposure.
CF_POINT_SPACE = ScenarioSpace(
    dims=(
        DimensionSpec(name="v_lead", lower=20.0, upper=40.0, step=1.0, unit="m/s"),
        DimensionSpec(name="gap", lower=0.0, upper=300.0, step=5.0, unit="m"),
        DimensionSpec(name="v_follow", lower=20.0, upper=40.0, step=1.0, unit="m/s"),
    )
)


def _points(events: EventBatch, space: ScenarioSpace) -> np.ndarray:
    columns = events.observations()
    missing = [n for n in space.names if n not in columns]
    if missing:
        raise DomainError(
            f"{events.case} events carry no column for {', '.join(missing)}"
        )
    return np.column_stack([columns[n] for n in space.names])


def _counts(events: EventBatch, space: ScenarioSpace) -> tuple[np.ndarray, int]:
    cells = space.locate(_points(events, space))
    inside = cells >= 0
    rejected = int((~inside).sum())
    counts = np.bincount(cells[inside], minlength=space.total_count)
    return counts.astype(np.float64), rejected


def build_histogram(events: EventBatch, space: ScenarioSpace) -> ExposureModel:
    """Normalized cell counts.  Events outside the grid are rejected and
    their number is kept on the model."""
    with tracer.start_as_current_span(SPAN_NDD_HISTOGRAM) as span:
        span.set_attribute(ATTR_CASE, events.case.value)
        counts, rejected = _counts(events, space)
        kept = counts.sum()
        span.set_attribute(ATTR_EVENT_COUNT, int(kept))
        span.set_attribute(ATTR_REJECTED, rejected)
    if kept == 0:
        raise EmptyInputError(
            f"no event falls inside the space ({rejected} rejected)"
        )
    if rejected:
        logger.warning("Rejected %d events outside the scenario space.", rejected)
    logger.info("Histogram over %d cells from %d events.", space.total_count, int(kept))
    return ExposureModel(space=space, mass=counts / kept, rejected=rejected)


def mdp_exposure(
    events: EventBatch, space: ScenarioSpace, actions: np.ndarray
) -> ExposureModel:
    """State mass P(s) from car-following points and action mass P(u|s)
    from free-driving pairs.

    P(u|s) is the action histogram of the free-driving pairs whose speed
    falls in the same speed bucket as the state's lead speed.  Buckets
    without observations fall back to uniform over the actions.
    """
    if not len(events.trajectory) or not len(events.free_driving):
        raise EmptyInputError("mdp exposure needs trajectory and free-driving events")
    state_model = build_histogram(events, space)

    speed_dim = space.dims[0]
    speed_axis = ScenarioSpace(dims=(speed_dim,))
    v_bucket = speed_axis.snap(events.free_driving[:, :1])
    action_step = actions[1] - actions[0] if len(actions) > 1 else 1.0
    u_index = np.clip(
        np.rint((events.free_driving[:, 1] - actions[0]) / action_step).astype(int),
        0,
        len(actions) - 1,
    )
    table = np.zeros((speed_axis.total_count, len(actions)))
    np.add.at(table, (v_bucket, u_index), 1.0)
    totals = table.sum(axis=1, keepdims=True)
    uniform = np.full(len(actions), 1.0 / len(actions))
    table = np.where(totals > 0, table / np.where(totals > 0, totals, 1.0), uniform)
    empty = int((totals[:, 0] == 0).sum())
    if empty:
        logger.info(
            "%d speed buckets without free-driving data use uniform P(u|s).", empty
        )

    state_speed = space.cell_coords(np.arange(space.total_count))[:, 0]
    return ExposureModel(
        space=space,
        mass=state_model.mass,
        kind="mdp",
        actions=actions,
        action_mass=table[state_speed],
        rejected=state_model.rejected,
    )


def highway_exposure(events: EventBatch, space: ScenarioSpace) -> ExposureModel:
    """Four-dimensional highway exposure.

    The first BV position is uniform over its grid and the remaining
    (v_lead, gap, v_follow) triple comes from the car-following point
    histogram.  The BV at the larger position leads; ties lead with BV1.
    """
    cf = build_histogram(events, CF_POINT_SPACE)
    values = space.all_values()
    p1, v1, p2, v2 = values.T
    bv1_leads = p1 >= p2
    triple = np.column_stack([
        np.where(bv1_leads, v1, v2),
        np.abs(p1 - p2),
        np.where(bv1_leads, v2, v1),
    ])
    cells = CF_POINT_SPACE.locate(triple)
    position_mass = 1.0 / space.counts[space.dim_index("bv1_position")]
    mass = np.where(cells >= 0, position_mass * cf.mass[np.maximum(cells, 0)], 0.0)
    total = mass.sum()
    if total == 0:
        raise EmptyInputError("car-following histogram misses every highway scenario")
    return ExposureModel(space=space, mass=mass / total, rejected=cf.rejected)
