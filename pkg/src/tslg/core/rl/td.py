"""Temporal-difference training of the state-action criticality table.

Q(s, u) is the probability that the surrogate collides after the lead
plays u in s, weighted by the naturalistic P(u|s).  Its fixed point is

    Q(s, u) = P(u|s) · Σ_u' Q(s', u')

with Σ_u' Q = 1 on collision and 0 on safe terminals.

Training runs one episode per dangerous (state, action) pair each sweep,
rooted at that pair and continued with uniformly drawn actions until a
terminal or the horizon.  Episodes advance in lock step; the updates of
one step are applied together, each distinct pair once.

Horizon cut: an episode that reaches the horizon inside the dangerous zone
stops without a backup.  Targets are one-step, so the trained table is the
horizon-free fixed point solved by ``backward_induction_q``.  Counting
horizon expiry as no collision, P(S|·) = 0, is a property of sampled
episodes (``rollout_naturalistic``, the tree sampler, the exhaustive
oracle), not of this table.
"""

from __future__ import annotations

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict

from tslg.core.exceptions import ConvergenceError, DomainError
from tslg.core.scenario import ExposureModel
from tslg.infra.telemetry import ATTR_SWEEPS, ATTR_UPDATES, SPAN_RL_TD_TRAIN, tracer

from .mdp import COLLISION, SAFE, TabularMdp

logger = logging.getLogger(__name__)


class QTable(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    q: np.ndarray
    alpha_lr: float | None = None
    delta0: float | None = None
    sweeps: int = 0
    updates: int = 0
    max_delta: float = 0.0

    @property
    def row_sums(self) -> np.ndarray:
        """P(S|s) = Σ_u Q(s, u)."""
        return self.q.sum(axis=1)


def td_targets(
    mdp: TabularMdp,
    p_action: np.ndarray,
    row_sum: np.ndarray,
    states: np.ndarray,
    actions: np.ndarray,
) -> np.ndarray:
    """One-step targets P(u|s)·P(S|s') for (s, u) pairs."""
    nxt = mdp.next_state[states, actions]
    follow = np.where(nxt >= 0, row_sum[np.maximum(nxt, 0)], 0.0)
    value = np.where(nxt == COLLISION, 1.0, np.where(nxt == SAFE, 0.0, follow))
    return p_action[states, actions] * value


def td_train(
    mdp: TabularMdp,
    exposure: ExposureModel,
    alpha_lr: float,
    delta0: float,
    seed: int,
    max_sweeps: int = 5000,
) -> QTable:
    """Train Q until the largest |δ| of a sweep drops below *delta0*.

    Raises ``ConvergenceError`` at *max_sweeps* with the last sweep's
    statistics.
    """
    if exposure.kind != "mdp" or exposure.action_mass is None:
        raise DomainError("TD training needs an mdp exposure model")
    if not 0.0 < alpha_lr <= 1.0:
        raise DomainError(f"learning rate must lie in (0, 1], got {alpha_lr!r}")
    rng = np.random.default_rng(seed)
    p_action = exposure.action_mass
    n_actions = mdp.n_actions
    q = np.zeros((mdp.n_states, n_actions))
    row_sum = np.zeros(mdp.n_states)

    dangerous = mdp.dangerous
    roots_s = np.repeat(dangerous, n_actions)
    roots_u = np.tile(np.arange(n_actions), len(dangerous))
    updates = 0
    max_delta = 0.0

    with tracer.start_as_current_span(SPAN_RL_TD_TRAIN) as span:
        for sweep in range(1, max_sweeps + 1):
            row_sum = q.sum(axis=1)
            order = rng.permutation(len(roots_s))
            s, u = roots_s[order], roots_u[order]
            max_delta = 0.0
            for _ in range(mdp.horizon):
                if not s.size:
                    break
                flat = s * n_actions + u
                _, first = np.unique(flat, return_index=True)
                us, uu = s[first], u[first]
                delta = td_targets(mdp, p_action, row_sum, us, uu) - q[us, uu]
                q[us, uu] += alpha_lr * delta
                np.add.at(row_sum, us, alpha_lr * delta)
                updates += len(us)
                if delta.size:
                    max_delta = max(max_delta, float(np.abs(delta).max()))

                nxt = mdp.next_state[s, u]
                alive = nxt >= 0
                s = nxt[alive]
                u = rng.integers(0, n_actions, size=s.size)

            logger.debug("TD sweep %d: max |delta| = %.3e.", sweep, max_delta)
            if max_delta < delta0:
                break
        span.set_attribute(ATTR_SWEEPS, sweep)
        span.set_attribute(ATTR_UPDATES, updates)

    if max_delta >= delta0:
        raise ConvergenceError(
            f"TD training did not converge in {max_sweeps} sweeps",
            sweeps=max_sweeps,
            updates=updates,
            max_delta=max_delta,
        )
    logger.info(
        "TD training converged after %d sweeps (%d updates, max |delta| %.2e).",
        sweep, updates, max_delta,
    )
    return QTable(
        q=q,
        alpha_lr=alpha_lr,
        delta0=delta0,
        sweeps=sweep,
        updates=updates,
        max_delta=max_delta,
    )
