"""Exact accident rates for spaces small enough to enumerate."""

from __future__ import annotations

import logging
import math

import numpy as np

from tslg.core.exceptions import DomainError, OracleRefusedError
from tslg.core.rl import COLLISION, SAFE, TabularMdp
from tslg.core.scenario import ExposureModel, ScenarioSpace
from tslg.infra.telemetry import ATTR_TESTS, SPAN_EVAL_EXHAUSTIVE, tracer

from .campaign import Subject

logger = logging.getLogger(__name__)

_CHUNK = 8192


def _check_cap(size: int, cap: int) -> None:
    if size > cap:
        raise OracleRefusedError(
            f"exhaustive evaluation over {size} cells exceeds the cap of {cap}"
        )


def exhaustive_truth(
    space: ScenarioSpace, subject: Subject, exposure: ExposureModel, cap: int
) -> float:
    """P(A) = Σ_x A(x)·P(x) over every cell with exposure mass."""
    if exposure.space != space:
        raise DomainError("exposure model and space disagree")
    _check_cap(space.total_count, cap)
    support = np.flatnonzero(exposure.mass > 0)
    terms: list[float] = []
    with tracer.start_as_current_span(SPAN_EVAL_EXHAUSTIVE) as span:
        span.set_attribute(ATTR_TESTS, int(support.size))
        for start in range(0, support.size, _CHUNK):
            cells = support[start : start + _CHUNK]
            event = np.asarray(subject(cells), dtype=bool)
            terms.extend(exposure.mass[cells[event]].tolist())
    truth = math.fsum(terms)
    logger.info(
        "Exhaustive P(A) = %.6e over %d cells with exposure.", truth, support.size
    )
    return truth


def episode_collision_prob(mdp: TabularMdp, p_action: np.ndarray) -> np.ndarray:
    """Per-state probability that a horizon-limited episode collides.

    Collision-zone roots count 1, safe-zone roots 0.
    """
    nxt = mdp.next_state
    h = np.zeros(mdp.n_states)
    for _ in range(mdp.horizon):
        follow = np.where(nxt >= 0, h[np.maximum(nxt, 0)], 0.0)
        value = np.where(nxt == COLLISION, 1.0, np.where(nxt == SAFE, 0.0, follow))
        h = (p_action * value).sum(axis=1)
    code = mdp.terminal_code(np.arange(mdp.n_states))
    return np.where(code == COLLISION, 1.0, np.where(code == SAFE, 0.0, h))


def exhaustive_mdp_truth(mdp: TabularMdp, exposure: ExposureModel, cap: int) -> float:
    """Exact accident rate of naturalistic episodes on *mdp*."""
    if exposure.action_mass is None:
        raise DomainError("episode evaluation needs an mdp exposure model")
    _check_cap(mdp.n_states, cap)
    with tracer.start_as_current_span(SPAN_EVAL_EXHAUSTIVE) as span:
        span.set_attribute(ATTR_TESTS, mdp.n_states)
        h = episode_collision_prob(mdp, exposure.action_mass)
        truth = math.fsum((exposure.mass * h).tolist())
    logger.info("Exhaustive episode P(A) = %.6e over %d states.", truth, mdp.n_states)
    return truth
