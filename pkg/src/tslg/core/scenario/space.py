"""Discretized scenario spaces.

A space is a hyper-rectangular grid.  Cells are addressed by a row-major
integer index over the dimensions in their listed order, which is also the
order used in persisted libraries.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from tslg.configs.case import CaseConfig, DimensionSpec
from tslg.core.exceptions import ConfigurationError, DomainError

_COUNT_TOLERANCE = 1e-9


def dimension_count(dim: DimensionSpec) -> int:
    """Number of grid values along *dim*."""
    steps = math.floor((dim.upper - dim.lower) / dim.step + _COUNT_TOLERANCE)
    return steps if dim.lower_open else steps + 1


def dimension_values(dim: DimensionSpec) -> np.ndarray:
    offset = 1 if dim.lower_open else 0
    k = np.arange(dimension_count(dim), dtype=np.float64) + offset
    return dim.lower + k * dim.step


class ScenarioSpace(BaseModel):
    """Grid of decision variables plus the fixed environment parameters θ."""

    model_config = ConfigDict(frozen=True)

    dims: tuple[DimensionSpec, ...] = Field(min_length=1)
    fixed_params: dict[str, float] = Field(default_factory=dict)

    # ---- shape -----------------------------------------------------------

    @cached_property
    def counts(self) -> tuple[int, ...]:
        return tuple(dimension_count(d) for d in self.dims)

    @property
    def total_count(self) -> int:
        return math.prod(self.counts)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dims)

    def dim_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError as exc:
            raise DomainError(f"space has no dimension {name!r}") from exc

    @cached_property
    def grid_values(self) -> tuple[np.ndarray, ...]:
        values = tuple(dimension_values(d) for d in self.dims)
        for v in values:
            v.setflags(write=False)
        return values

    # ---- index arithmetic ------------------------------------------------

    def check_cell(self, cell: int | np.ndarray) -> None:
        arr = np.asarray(cell)
        if arr.size and (arr.min() < 0 or arr.max() >= self.total_count):
            raise DomainError(
                f"cell index outside [0, {self.total_count}): {cell!r}"
            )

    def cell_index(self, coords: Sequence[int] | np.ndarray) -> int | np.ndarray:
        """Row-major index of integer grid coordinates (last axis = dims)."""
        arr = np.asarray(coords, dtype=np.int64)
        try:
            index = np.ravel_multi_index(tuple(np.moveaxis(arr, -1, 0)), self.counts)
        except ValueError as exc:
            raise DomainError(f"coordinates outside the grid: {coords!r}") from exc
        return int(index) if np.ndim(index) == 0 else index

    def cell_coords(self, cell: int | np.ndarray) -> np.ndarray:
        """Integer coordinates of *cell*; shape (..., ndim)."""
        self.check_cell(cell)
        return np.stack(np.unravel_index(cell, self.counts), axis=-1)

    def cell_values(self, cell: int | np.ndarray) -> np.ndarray:
        """Physical values of *cell*; shape (..., ndim)."""
        coords = self.cell_coords(cell)
        return np.stack(
            [self.grid_values[i][coords[..., i]] for i in range(self.ndim)],
            axis=-1,
        )

    def all_values(self) -> np.ndarray:
        """Physical values of every cell in index order; shape (N, ndim)."""
        return self.cell_values(np.arange(self.total_count))

    def locate(self, values: np.ndarray) -> np.ndarray:
        """Bin physical points to cells; ``-1`` marks points outside the grid.

        Closed dimensions bin to the nearest grid value.  Half-open
        dimensions bin ``(v - step, v]`` to the grid value ``v``.
        """
        pts = np.atleast_2d(np.asarray(values, dtype=np.float64))
        coords = np.empty(pts.shape, dtype=np.int64)
        inside = np.ones(len(pts), dtype=bool)
        for i, dim in enumerate(self.dims):
            scaled = (pts[:, i] - dim.lower) / dim.step
            if dim.lower_open:
                k = np.ceil(scaled - _COUNT_TOLERANCE).astype(np.int64) - 1
                inside &= pts[:, i] > dim.lower
            else:
                k = np.floor(scaled + 0.5).astype(np.int64)
            inside &= (k >= 0) & (k < self.counts[i])
            coords[:, i] = np.clip(k, 0, self.counts[i] - 1)
        cells = np.ravel_multi_index(tuple(coords.T), self.counts)
        return np.where(inside, cells, -1)

    def snap(self, values: np.ndarray) -> np.ndarray:
        """Nearest-cell rounding with clipping to the grid; never ``-1``."""
        pts = np.atleast_2d(np.asarray(values, dtype=np.float64))
        coords = np.empty(pts.shape, dtype=np.int64)
        for i, dim in enumerate(self.dims):
            offset = 1 if dim.lower_open else 0
            k = np.rint((pts[:, i] - dim.lower) / dim.step).astype(np.int64) - offset
            coords[:, i] = np.clip(k, 0, self.counts[i] - 1)
        return np.ravel_multi_index(tuple(coords.T), self.counts)

    def neighbors(self, cell: int) -> Iterator[int]:
        """Axis neighbors (one step along one dimension), ascending by axis."""
        coords = self.cell_coords(cell)
        for axis, count in enumerate(self.counts):
            for delta in (-1, 1):
                k = coords[axis] + delta
                if 0 <= k < count:
                    moved = coords.copy()
                    moved[axis] = k
                    yield self.cell_index(moved)


def build_space(config: CaseConfig) -> ScenarioSpace:
    """Decision space of *config* (the state grid for the MDP case)."""
    try:
        return ScenarioSpace(dims=tuple(config.space), fixed_params=config.fixed_params)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc


def action_values(config: CaseConfig) -> np.ndarray:
    """Action grid of the MDP case."""
    if config.actions is None:
        raise ConfigurationError(f"case {config.case} has no action grid")
    return dimension_values(config.actions)
