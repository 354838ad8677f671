"""Library search: multi-start greedy descent on the objective, then
flood fill from every visited cell whose criticality exceeds γ.

Evaluations are batched per neighborhood and cached per cell, so each cell
is simulated at most once per search.
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

from tslg.configs.case import CaseId
from tslg.core.exceptions import DomainError
from tslg.core.scenario import GridLibrary, ScenarioSpace
from tslg.infra.telemetry import (
    ATTR_CASE,
    ATTR_EVALUATIONS,
    ATTR_GAMMA,
    ATTR_LIBRARY_SIZE,
    SPAN_SEARCH_LIBRARY,
    tracer,
)

logger = logging.getLogger(__name__)

CellFunction = Callable[[np.ndarray], np.ndarray]


class _Cache:
    """Per-cell memo of a vectorized cell function."""

    def __init__(self, fn: CellFunction) -> None:
        self._fn = fn
        self._values: dict[int, float] = {}

    def __len__(self) -> int:
        return len(self._values)

    def __call__(self, cells: list[int] | np.ndarray) -> np.ndarray:
        cells = [int(c) for c in cells]
        missing = sorted({c for c in cells if c not in self._values})
        if missing:
            out = np.asarray(self._fn(np.array(missing, dtype=np.int64)), dtype=float)
            self._values.update(zip(missing, out.tolist(), strict=True))
        return np.array([self._values[c] for c in cells])


def neighbor_cells(space: ScenarioSpace, cells: np.ndarray) -> np.ndarray:
    """Axis neighbors of each cell, shape (n, 2·ndim); ``-1`` off the grid.

    Columns are ordered by axis, then −1 before +1.
    """
    cells = np.asarray(cells, dtype=np.int64)
    coords = space.cell_coords(cells).reshape(-1, space.ndim)
    counts = np.array(space.counts)
    out = np.full((len(coords), 2 * space.ndim), -1, dtype=np.int64)
    for axis in range(space.ndim):
        for j, delta in enumerate((-1, 1)):
            moved = coords.copy()
            moved[:, axis] += delta
            ok = (moved[:, axis] >= 0) & (moved[:, axis] < counts[axis])
            if ok.any():
                out[ok, 2 * axis + j] = space.cell_index(moved[ok])
    return out


def _descend(
    space: ScenarioSpace, start: int, objective: _Cache, visited: set[int]
) -> int:
    current = start
    j_current = objective([current])[0]
    visited.add(current)
    while True:
        nbrs = neighbor_cells(space, np.array([current]))[0]
        nbrs = np.sort(nbrs[nbrs >= 0])
        values = objective(nbrs)
        best = int(np.argmin(values))
        visited.update(int(c) for c in nbrs)
        if values[best] >= j_current:
            return current
        current, j_current = int(nbrs[best]), values[best]


def _flood_fill(
    space: ScenarioSpace, seeds: np.ndarray, crit: _Cache, gamma: float
) -> set[int]:
    members = {int(c) for c in seeds}
    seen = set(members)
    frontier = np.array(sorted(members), dtype=np.int64)
    while frontier.size:
        nbrs = neighbor_cells(space, frontier).ravel()
        fresh = np.array(
            sorted({int(c) for c in nbrs if c >= 0 and int(c) not in seen}),
            dtype=np.int64,
        )
        seen.update(fresh.tolist())
        if not fresh.size:
            break
        hot = fresh[crit(fresh) > gamma]
        members.update(hot.tolist())
        frontier = hot
    return members


def search_library(
    case: CaseId,
    space: ScenarioSpace,
    objective: CellFunction,
    criticality: CellFunction,
    starts: int,
    gamma: float,
    seed: int,
) -> GridLibrary:
    """Grid library of every discovered cell with V > γ.

    *objective* and *criticality* map arrays of cell indices to J and V.
    Descent moves to the best axis neighbor (lowest index on ties) while it
    strictly improves J.  Deterministic for a fixed seed.
    """
    if starts < 1:
        raise DomainError(f"starts must be at least 1, got {starts}")
    rng = np.random.default_rng(seed)
    j_cache, v_cache = _Cache(objective), _Cache(criticality)

    with tracer.start_as_current_span(SPAN_SEARCH_LIBRARY) as span:
        span.set_attribute(ATTR_CASE, case.value)
        span.set_attribute(ATTR_GAMMA, gamma)
        visited: set[int] = set()
        minima = []
        for start in rng.integers(0, space.total_count, size=starts):
            minima.append(_descend(space, int(start), j_cache, visited))
        logger.debug("Descent reached %d distinct minima.", len(set(minima)))

        candidates = np.array(sorted(visited), dtype=np.int64)
        seeds = candidates[v_cache(candidates) > gamma]
        members = np.array(
            sorted(_flood_fill(space, seeds, v_cache, gamma)), dtype=np.int64
        )
        values = v_cache(members) if members.size else np.empty(0)

        span.set_attribute(ATTR_LIBRARY_SIZE, int(members.size))
        span.set_attribute(ATTR_EVALUATIONS, len(v_cache))

    if not members.size:
        logger.warning("No cell with V > %.3g found; the library is empty.", gamma)
    logger.info(
        "Library search found %d critical cells (%d evaluations, gamma=%.3g).",
        members.size, len(v_cache), gamma,
    )
    return GridLibrary.from_values(case, space, gamma, members, values)
