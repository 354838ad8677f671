"""Test-scenario samplers.

A sampler draws batches of scenarios together with their likelihood ratio
P(x|θ)/P̄(x|θ).  Grid samplers draw cells; tree samplers draw episodes on
the subject's decision process, choosing the lead action at every observed
state, so their draws already carry the accident indicator.

Library samplers mix the library's criticality with ε of exploration;
naturalistic samplers draw from the exposure model itself (ratio 1).
"""

from __future__ import annotations

import logging
from abc import abstractmethod
from typing import Protocol

import numpy as np
from pydantic import BaseModel, ConfigDict

from tslg.core.exceptions import DomainError, EmptyLibraryError, LibraryMismatchError
from tslg.core.rl import COLLISION, TabularMdp, posterior_initial, sample_actions
from tslg.core.scenario import ExposureModel, GridLibrary, Library, TreeLibrary

logger = logging.getLogger(__name__)

MASS_TOLERANCE = 1e-12


class SampleDraw(BaseModel):
    """One sampled test scenario."""

    model_config = ConfigDict(frozen=True)

    cell: int
    actions: tuple[int, ...] = ()
    ratio: float
    explored: bool
    event: bool | None = None

    @property
    def scenario_id(self) -> str:
        if self.event is None:
            return str(self.cell)
        return f"{self.cell}:" + "-".join(str(u) for u in self.actions)


class DrawBatch(BaseModel):
    """Parallel arrays of a batch of draws.

    ``actions`` is ``(n, horizon)`` with -1 padding for tree draws and
    ``None`` for grid draws.  ``event`` is filled when drawing already ran
    the subject.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    cells: np.ndarray
    ratio: np.ndarray
    explored: np.ndarray
    actions: np.ndarray | None = None
    event: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.cells)

    def scenario_ids(self) -> list[str]:
        if self.actions is None:
            return [str(int(c)) for c in self.cells]
        ids = []
        for cell, row in zip(self.cells, self.actions, strict=True):
            taken = row[row >= 0]
            ids.append(f"{int(cell)}:" + "-".join(str(int(u)) for u in taken))
        return ids

    def draw(self, i: int) -> SampleDraw:
        actions = ()
        if self.actions is not None:
            row = self.actions[i]
            actions = tuple(int(u) for u in row[row >= 0])
        return SampleDraw(
            cell=int(self.cells[i]),
            actions=actions,
            ratio=float(self.ratio[i]),
            explored=bool(self.explored[i]),
            event=None if self.event is None else bool(self.event[i]),
        )


class Sampler(Protocol):
    """Anything that draws seeded batches of test scenarios."""

    sampler_name: str

    @abstractmethod
    def draw(self, rng: np.random.Generator, n: int) -> DrawBatch: ...


def _inverse_cdf(
    rng: np.random.Generator, cumulative: np.ndarray, n: int
) -> np.ndarray:
    draws = rng.random(n) * cumulative[-1]
    index = np.searchsorted(cumulative, draws, side="right")
    return np.minimum(index, len(cumulative) - 1)


# ---------------------------------------------------------------------------
# Grid samplers
# ---------------------------------------------------------------------------


class GridSampler(Sampler):
    """Draws cells from a fixed mass over the scenario grid."""

    def __init__(
        self,
        exposure: ExposureModel,
        mass: np.ndarray,
        members: np.ndarray | None = None,
        name: str = "grid",
    ) -> None:
        total = float(mass.sum())
        if abs(total - 1.0) > 1e3 * MASS_TOLERANCE:
            raise DomainError(f"sampling masses sum to {total!r}, not 1")
        self.sampler_name = name
        self.exposure = exposure
        self.mass = mass
        self._cumulative = np.cumsum(mass)
        self._member = np.zeros(len(mass), dtype=bool)
        if members is not None:
            self._member[members] = True

    def draw(self, rng: np.random.Generator, n: int) -> DrawBatch:
        cells = _inverse_cdf(rng, self._cumulative, n)
        return DrawBatch(
            cells=cells,
            ratio=self.exposure.mass[cells] / self.mass[cells],
            explored=~self._member[cells],
        )


def grid_sampling_mass(library: GridLibrary, epsilon: float) -> np.ndarray:
    """(1−ε)·V/W on the library, ε/(N(X)−N(Φ)) on every other cell."""
    n = library.space.total_count
    if not library.size or not library.w > 0:
        raise EmptyLibraryError("cannot sample from an empty library")
    off = n - library.size
    mass = np.full(n, epsilon / off if off else 0.0)
    in_share = 1.0 - epsilon if off else 1.0
    mass[library.cells] = in_share * library.values / library.w
    return mass


# ---------------------------------------------------------------------------
# Tree samplers
# ---------------------------------------------------------------------------


class TreeSampler(Sampler):
    """Episodes on the subject's decision process.

    Roots come from ``root_mass`` and lead actions from the per-state rows
    of ``action_mass``.  The ratio accumulates P/P̄ over the realized root
    and actions.  An episode hits when it reaches the collision code; a
    root already in the collision zone counts as a hit.
    """

    def __init__(
        self,
        mdp: TabularMdp,
        exposure: ExposureModel,
        root_mass: np.ndarray,
        action_mass: np.ndarray,
        members: np.ndarray | None = None,
        name: str = "tree",
    ) -> None:
        if exposure.action_mass is None:
            raise DomainError("tree sampling needs an mdp exposure model")
        self.sampler_name = name
        self.mdp = mdp
        self.exposure = exposure
        self.root_mass = root_mass
        self.action_mass = action_mass
        self._root_cumulative = np.cumsum(root_mass)
        self._action_cumulative = np.cumsum(action_mass, axis=1)
        self._member = np.zeros(mdp.n_states, dtype=bool)
        if members is not None:
            self._member[members] = True

    def draw(self, rng: np.random.Generator, n: int) -> DrawBatch:
        mdp = self.mdp
        roots = _inverse_cdf(rng, self._root_cumulative, n)
        ratio = self.exposure.mass[roots] / self.root_mass[roots]
        explored = ~self._member[roots]
        actions = np.full((n, mdp.horizon), -1, dtype=np.int64)

        code = mdp.terminal_code(roots)
        hit = code == COLLISION
        active = np.flatnonzero(code >= 0)
        current = code[active]
        for k in range(mdp.horizon):
            if not active.size:
                break
            u = sample_actions(rng, self._action_cumulative, current)
            actions[active, k] = u
            ratio[active] *= (
                self.exposure.action_mass[current, u] / self.action_mass[current, u]
            )
            explored[active] |= ~self._member[current]
            nxt = mdp.next_state[current, u]
            hit[active[nxt == COLLISION]] = True
            keep = nxt >= 0
            active, current = active[keep], nxt[keep]
        return DrawBatch(
            cells=roots, ratio=ratio, explored=explored, actions=actions, event=hit
        )


def tree_sampling_mass(
    library: TreeLibrary, exposure: ExposureModel, epsilon: float
) -> tuple[np.ndarray, np.ndarray]:
    """ε-mixed root and action masses.

    Roots: (1−ε)·P(s₁|S) + ε/N(X).  Actions: (1−ε)·P(u|s, S) + ε/|U| on
    states with collision mass, uniform elsewhere.
    """
    q = library.q_matrix
    n_states, n_actions = q.shape
    root = (1.0 - epsilon) * posterior_initial(q, exposure) + epsilon / n_states
    totals = q.sum(axis=1, keepdims=True)
    posterior = q / np.where(totals > 0, totals, 1.0)
    uniform = 1.0 / n_actions
    mixed = (1.0 - epsilon) * posterior + epsilon * uniform
    actions = np.where(totals > 0, mixed, uniform)
    return root, actions


# ---------------------------------------------------------------------------
# Factories
# ---------------------------------------------------------------------------


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")


def build_sampler(
    library: Library,
    exposure: ExposureModel,
    epsilon: float,
    mdp: TabularMdp | None = None,
) -> Sampler:
    """ε-greedy sampler over *library*.

    Tree libraries need the subject's decision process *mdp*, on which the
    sampled episodes run.
    """
    _check_epsilon(epsilon)
    if library.space != exposure.space:
        raise LibraryMismatchError("library and exposure model use different grids")
    if isinstance(library, GridLibrary):
        mass = grid_sampling_mass(library, epsilon)
        logger.info(
            "Grid sampler: %d library cells, epsilon=%.3g.", library.size, epsilon
        )
        return GridSampler(exposure, mass, members=library.cells, name="library")

    if mdp is None:
        raise DomainError("a tree library needs the subject's decision process")
    if mdp.space != library.space or not np.allclose(mdp.actions, library.actions):
        raise LibraryMismatchError("library and decision process use different grids")
    if not library.size:
        raise EmptyLibraryError("cannot sample from an empty library")
    root, actions = tree_sampling_mass(library, exposure, epsilon)
    members = np.array([row.state for row in library.q_table], dtype=np.int64)
    logger.info(
        "Tree sampler: %d library states, epsilon=%.3g.", library.size, epsilon
    )
    return TreeSampler(mdp, exposure, root, actions, members=members, name="library")


def ndd_sampler(exposure: ExposureModel, mdp: TabularMdp | None = None) -> Sampler:
    """Naturalistic sampler: draws straight from the exposure model."""
    if mdp is None:
        return GridSampler(exposure, exposure.mass, name="ndd")
    if exposure.action_mass is None:
        raise DomainError("naturalistic episodes need an mdp exposure model")
    return TreeSampler(mdp, exposure, exposure.mass, exposure.action_mass, name="ndd")


def sample_scenario(sampler: Sampler, rng: np.random.Generator) -> SampleDraw:
    return sampler.draw(rng, 1).draw(0)
