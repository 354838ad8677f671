"""Common set Ω and the distance normalization factors derived from it."""

from __future__ import annotations

import math
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from tslg.core.exceptions import DomainError, ExtractionError
from tslg.core.scenario import ExposureModel


class CommonSet(BaseModel):
    """Axis-aligned hyper-rectangle of high-exposure scenarios."""

    model_config = ConfigDict(frozen=True)

    names: tuple[str, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @model_validator(mode="after")
    def _check_bounds(self) -> Self:
        if not len(self.names) == len(self.lower) == len(self.upper):
            raise ValueError("names and bounds must have the same length")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper, strict=True)):
            raise ValueError("lower bound above upper bound")
        return self

    def distances(self, values: np.ndarray) -> np.ndarray:
        """Per-dimension distance of points to Ω; shape (..., ndim)."""
        pts = np.asarray(values, dtype=np.float64)
        lo, hi = np.array(self.lower), np.array(self.upper)
        return np.maximum(lo - pts, 0.0) + np.maximum(pts - hi, 0.0)

    def contains(self, values: np.ndarray) -> np.ndarray | bool:
        inside = (self.distances(values) == 0).all(axis=-1)
        return bool(inside) if np.ndim(inside) == 0 else inside


def _bounding_box(model: ExposureModel, cells: np.ndarray) -> CommonSet:
    values = model.space.cell_values(cells).reshape(-1, model.space.ndim)
    return CommonSet(
        names=model.space.names,
        lower=tuple(float(v) for v in values.min(axis=0)),
        upper=tuple(float(v) for v in values.max(axis=0)),
    )


def extract_common_set(model: ExposureModel, threshold: float) -> CommonSet:
    """Minimal bounding box of every cell with mass above *threshold*."""
    cells = np.flatnonzero(model.mass > threshold)
    if not cells.size:
        raise ExtractionError(
            f"no cell has exposure above {threshold!r} "
            f"(max {float(model.mass.max())!r})"
        )
    return _bounding_box(model, cells)


def most_frequent_common_set(model: ExposureModel) -> CommonSet:
    """Degenerate Ω holding only the most frequent scenario (lowest index on ties)."""
    return _bounding_box(model, np.array([int(model.mass.argmax())]))


def common_set_for(model: ExposureModel, mode: str, threshold: float) -> CommonSet:
    if mode == "most_frequent":
        return most_frequent_common_set(model)
    if mode == "threshold":
        return extract_common_set(model, threshold)
    raise DomainError(f"unknown common-set mode {mode!r}")


def normalization_factors(
    model: ExposureModel, omega: CommonSet, precision: float = 1.0
) -> dict[str, float]:
    """Largest per-dimension distance from any grid value to Ω, rounded up
    to *precision*.  A zero factor is clamped to 1."""
    if precision <= 0:
        raise DomainError("precision must be positive")
    factors: dict[str, float] = {}
    for i, (name, grid) in enumerate(
        zip(model.space.names, model.space.grid_values, strict=True)
    ):
        below = np.maximum(omega.lower[i] - grid, 0.0)
        gap = below + np.maximum(grid - omega.upper[i], 0.0)
        factor = math.ceil(float(gap.max()) / precision - 1e-9) * precision
        factors[name] = factor if factor > 0 else 1.0
    return factors
