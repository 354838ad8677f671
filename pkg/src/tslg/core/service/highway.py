"""Highway-exit case: four-dimensional grid library scored by task difficulty."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from tslg.configs.case import CaseConfig, CaseId
from tslg.core.evaluation import (
    Sampler,
    Subject,
    build_sampler,
    exhaustive_truth,
    ndd_sampler,
)
from tslg.core.ndd import (
    EventBatch,
    common_set_for,
    highway_exposure,
    normalization_factors,
)
from tslg.core.scenario import ExposureModel, GridLibrary, Library
from tslg.core.search import (
    criticality,
    exit_failures,
    feasible_zone,
    gamma_threshold,
    highway_objective,
    search_library,
)

from .base import ACCIDENT_MAP_COLUMNS, CasePipeline

logger = logging.getLogger(__name__)


class _CellMemo:
    """Per-cell memo of a deterministic scalar function of scenario values."""

    def __init__(self, space, fn) -> None:
        self._space = space
        self._fn = fn
        self._seen: dict[int, float] = {}

    def __call__(self, cells: np.ndarray) -> np.ndarray:
        cells = np.asarray(cells, dtype=np.int64)
        fresh = sorted({int(c) for c in cells} - self._seen.keys())
        if fresh:
            values = self._space.cell_values(np.array(fresh, dtype=np.int64))
            for cell, x in zip(fresh, values, strict=True):
                self._seen[cell] = float(self._fn(x))
        return np.array([self._seen[int(c)] for c in cells])


class HighwayExitPipeline(CasePipeline):
    pipeline_name = CaseId.HIGHWAY_EXIT
    subject_name = "cav_exit"

    def __init__(self, config: CaseConfig) -> None:
        super().__init__(config)
        self._sm_failure = _CellMemo(
            self.space, lambda x: exit_failures(x, self.config, "sm")[0]
        )
        self._cav_failure = _CellMemo(
            self.space, lambda x: exit_failures(x, self.config, "cav")[0]
        )
        self._zone_area = _CellMemo(
            self.space, lambda x: feasible_zone(x, self.config).area
        )

    def exposure(self, events: EventBatch) -> ExposureModel:
        return highway_exposure(events, self.space)

    def build_library(
        self, exposure: ExposureModel, seed: int, **options: Any
    ) -> GridLibrary:
        cfg = self.config
        ndd, obj = cfg.ndd, cfg.objective
        omega = common_set_for(exposure, ndd.common_set_mode, ndd.common_set_threshold)
        factors = obj.u_f or normalization_factors(
            exposure, omega, obj.factor_precision
        )
        logger.info("Common set %s, factors %s.", omega, factors)

        def objective(cells: np.ndarray) -> np.ndarray:
            values = self.space.cell_values(cells)
            return np.array([
                highway_objective(x, feasible_zone(x, cfg), omega, cfg, factors)
                for x in values
            ])

        def crit(cells: np.ndarray) -> np.ndarray:
            cells = np.asarray(cells, dtype=np.int64)
            mass = exposure.mass[cells]
            event = np.zeros(len(cells))
            seen = mass > 0
            event[seen] = self._sm_failure(cells[seen])
            return criticality(event, mass)

        gamma = gamma_threshold(cfg.search.exploration_m, self.space)
        return search_library(
            self.pipeline_name,
            self.space,
            objective,
            crit,
            cfg.search.starts,
            gamma,
            seed,
        )

    def subject(self) -> Subject:
        def failure(cells: np.ndarray) -> np.ndarray:
            return self._cav_failure(cells).astype(bool)

        return failure

    def library_sampler(self, library: Library, exposure: ExposureModel) -> Sampler:
        return build_sampler(library, exposure, self.config.sampling.epsilon)

    def baseline_sampler(self, exposure: ExposureModel) -> Sampler:
        return ndd_sampler(exposure)

    def ground_truth(self, exposure: ExposureModel, cap: int) -> float:
        return exhaustive_truth(self.space, self.subject(), exposure, cap)

    def accident_map(self, library: Library, exposure: ExposureModel):
        """Library cells only: surrogate failure, feasible-zone area, exposure, V."""
        self.check_library(library)
        cells = library.cells
        values = self.space.cell_values(cells)
        failed = self._sm_failure(cells)
        area = self._zone_area(cells)
        header = ("cell", *self.space.names, *ACCIDENT_MAP_COLUMNS)
        rows = [
            (int(c), *(float(x) for x in values[i]), int(failed[i]), float(area[i]),
             float(exposure.mass[c]), float(library.values[i]), 1)
            for i, c in enumerate(cells)
        ]
        return header, rows
