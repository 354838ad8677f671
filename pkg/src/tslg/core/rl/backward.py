"""Exact fixed point of the criticality table.

The collision probability h(s) = Σ_u Q(s, u) of the dangerous states solves
the linear system h = M h + b, where M[s, s'] sums P(u|s) over actions
leading from s to s' and b[s] sums P(u|s) over actions leading to a
collision.  Snapping can map a state onto itself, so the system is solved
directly instead of by an ordered sweep.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import spsolve

from tslg.core.exceptions import CyclicGraphError, DomainError
from tslg.core.scenario import ExposureModel
from tslg.infra.telemetry import ATTR_DANGEROUS, SPAN_RL_BACKWARD, tracer

from .mdp import COLLISION, SAFE, TabularMdp
from .td import QTable

logger = logging.getLogger(__name__)


def _check_drains(
    dangerous: np.ndarray, rows: np.ndarray, cols: np.ndarray, exits: np.ndarray
) -> None:
    """Every dangerous state must reach a terminal through positive-mass
    actions.  Node ``n`` stands for all terminals."""
    n = len(dangerous)
    # reversed edges: successor -> predecessor, terminal node -> exit states
    src = np.concatenate([cols, np.full(exits.size, n)])
    dst = np.concatenate([rows, exits])
    graph = sparse.csr_matrix(
        (np.ones(src.size), (src, dst)), shape=(n + 1, n + 1)
    )
    reached = csgraph.breadth_first_order(
        graph, n, directed=True, return_predecessors=False
    )
    stuck = np.setdiff1d(np.arange(n), reached)
    if stuck.size:
        raise CyclicGraphError(
            f"{stuck.size} dangerous states never reach a terminal, "
            f"e.g. state {int(dangerous[stuck[0]])}"
        )


def backward_induction_q(mdp: TabularMdp, exposure: ExposureModel) -> QTable:
    if exposure.kind != "mdp" or exposure.action_mass is None:
        raise DomainError("backward induction needs an mdp exposure model")
    p_action = exposure.action_mass
    dangerous = mdp.dangerous
    q = np.zeros((mdp.n_states, mdp.n_actions))
    if not dangerous.size:
        return QTable(q=q)

    with tracer.start_as_current_span(SPAN_RL_BACKWARD) as span:
        span.set_attribute(ATTR_DANGEROUS, int(dangerous.size))
        local = np.full(mdp.n_states, -1, dtype=np.int64)
        local[dangerous] = np.arange(dangerous.size)
        nxt = mdp.next_state[dangerous]
        mass = p_action[dangerous]

        inner = (nxt >= 0) & (mass > 0)
        rows, acts = np.nonzero(inner)
        cols = local[nxt[rows, acts]]
        m = sparse.csr_matrix(
            (mass[rows, acts], (rows, cols)), shape=(dangerous.size, dangerous.size)
        )
        b = np.where(nxt == COLLISION, mass, 0.0).sum(axis=1)

        exits = np.flatnonzero(((nxt < 0) & (mass > 0)).any(axis=1))
        _check_drains(dangerous, rows, cols, exits)

        identity = sparse.identity(dangerous.size, format="csr")
        h = np.atleast_1d(spsolve((identity - m).tocsc(), b))

        full = np.zeros(mdp.n_states)
        full[dangerous] = h
        follow = np.where(nxt >= 0, full[np.maximum(nxt, 0)], 0.0)
        value = np.where(nxt == COLLISION, 1.0, np.where(nxt == SAFE, 0.0, follow))
        q[dangerous] = mass * value

    logger.info("Backward induction solved %d dangerous states.", dangerous.size)
    return QTable(q=q)
