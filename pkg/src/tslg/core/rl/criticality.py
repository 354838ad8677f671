"""Posteriors, P(S) and branch criticality on a trained table."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from tslg.core.exceptions import DomainError, EmptyLibraryError, ZeroPosteriorError
from tslg.core.scenario import ZONE_COLLISION, ZONE_SAFE, ExposureModel
from tslg.infra.telemetry import SPAN_RL_P_S, tracer

from .mdp import COLLISION, SAFE, TabularMdp
from .td import QTable

logger = logging.getLogger(__name__)

_CHUNK = 100_000


def state_collision_prob(q: np.ndarray, zones: np.ndarray) -> np.ndarray:
    """P(S|s): Σ_u Q(s, u) on dangerous states, 1 in the collision zone."""
    p = np.asarray(q).sum(axis=1)
    return np.where(zones == ZONE_COLLISION, 1.0, np.where(zones == ZONE_SAFE, 0.0, p))


def posterior_initial(q: QTable | np.ndarray, exposure: ExposureModel) -> np.ndarray:
    """P(s₁|S) ∝ P(S|s₁)·P(s₁) over the dangerous states."""
    table = q.q if isinstance(q, QTable) else np.asarray(q)
    weights = table.sum(axis=1) * exposure.mass
    total = weights.sum()
    if not total > 0:
        raise EmptyLibraryError(
            "the surrogate never reaches a collision; empty posterior"
        )
    return weights / total


def posterior_action(q: QTable | np.ndarray, s: int) -> np.ndarray:
    """P(u|s, S) = Q(s, u) / Σ_u' Q(s, u')."""
    row = (q.q if isinstance(q, QTable) else np.asarray(q))[s]
    total = row.sum()
    if not total > 0:
        raise ZeroPosteriorError(f"state {s} has no collision mass")
    return row / total


def follow_branch(
    mdp: TabularMdp, root: int, actions: Sequence[int]
) -> tuple[list[int], int]:
    """States visited by applying action indices from *root*, and the code
    the branch ends on (COLLISION, SAFE, or the last state if it runs out)."""
    code = int(mdp.terminal_code(np.array([root]))[0])
    states: list[int] = []
    for u in actions:
        if code < 0:
            break
        states.append(code)
        code = int(mdp.next_state[code, u])
    return states, code


def branch_criticality(
    q: QTable | np.ndarray,
    mdp: TabularMdp,
    root: int,
    actions: Sequence[int],
    exposure: ExposureModel,
    normalization: float = 1.0,
) -> float:
    """V of a root-to-collision branch: κ·P(s₁)·P(S|s₁)·Π P(u_k|s_k, S).

    The product telescopes to P(s₁)·Π P(u_k|s_k) = P(S|x)·P(x) on the
    fixed point, so κ is shared by every branch.  Branches that do not end
    in a collision, or leave the table's support, are worth 0.
    """
    table = q.q if isinstance(q, QTable) else np.asarray(q)
    states, end = follow_branch(mdp, root, actions)
    if end != COLLISION or len(states) != len(actions):
        return 0.0
    p_s = table[root].sum()
    if not p_s > 0:
        return 0.0
    value = normalization * float(exposure.mass[root]) * p_s
    for s, u in zip(states, actions, strict=True):
        row = table[s]
        if not row[u] > 0:
            return 0.0
        value *= row[u] / row.sum()
    return value


def normalization_constant(
    q: QTable | np.ndarray, mdp: TabularMdp, exposure: ExposureModel, p_s: float
) -> float:
    """κ = P(S) / Σ_s P(s)·P(S|s)."""
    table = q.q if isinstance(q, QTable) else np.asarray(q)
    denom = float((exposure.mass * state_collision_prob(table, mdp.zones)).sum())
    return p_s / denom if denom > 0 else 0.0


def sample_actions(
    rng: np.random.Generator, cumulative: np.ndarray, states: np.ndarray
) -> np.ndarray:
    """Inverse-CDF draw of one action per state from per-state cumulative rows."""
    rows = cumulative[states]
    draws = rng.random(len(states))[:, None] * rows[:, -1:]
    return np.minimum((draws >= rows).sum(axis=1), rows.shape[1] - 1)


def rollout_naturalistic(
    mdp: TabularMdp, exposure: ExposureModel, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Collision indicator of *n* episodes with roots from P(s) and actions
    from P(u|s); the horizon ends an episode as safe."""
    cum_actions = np.cumsum(exposure.action_mass, axis=1)
    states = rng.choice(mdp.n_states, size=n, p=exposure.mass)
    code = mdp.terminal_code(states)
    hit = code == COLLISION
    active = np.flatnonzero(code >= 0)
    current = code[active]
    for _ in range(mdp.horizon):
        if not active.size:
            break
        u = sample_actions(rng, cum_actions, current)
        nxt = mdp.next_state[current, u]
        hit[active[nxt == COLLISION]] = True
        keep = nxt >= 0
        active, current = active[keep], nxt[keep]
    return hit


def estimate_p_s(
    mdp: TabularMdp, exposure: ExposureModel, episodes: int, seed: int
) -> float:
    """Plain Monte Carlo estimate of the surrogate's collision probability."""
    if episodes < 1:
        raise DomainError("episodes must be at least 1")
    if exposure.action_mass is None:
        raise DomainError("P(S) needs an mdp exposure model")
    rng = np.random.default_rng(seed)
    hits = 0
    with tracer.start_as_current_span(SPAN_RL_P_S):
        for start in range(0, episodes, _CHUNK):
            size = min(_CHUNK, episodes - start)
            hits += int(rollout_naturalistic(mdp, exposure, size, rng).sum())
    p_s = hits / episodes
    logger.info("Monte Carlo P(S) = %.3e over %d episodes.", p_s, episodes)
    return p_s
