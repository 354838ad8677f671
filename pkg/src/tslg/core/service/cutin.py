"""Cut-in case: two-dimensional grid library under the IDM surrogate."""

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
    CommonSet,
    EventBatch,
    build_histogram,
    common_set_for,
    normalization_factors,
)
from tslg.core.scenario import ExposureModel, GridLibrary, Library
from tslg.core.search import (
    criticality,
    cutin_objective_array,
    gamma_threshold,
    search_library,
)
from tslg.core.vehicles import CutinOutcome, get_follower, rollout_cutin

from .base import ACCIDENT_MAP_COLUMNS, CasePipeline

logger = logging.getLogger(__name__)


class CutinPipeline(CasePipeline):
    pipeline_name = CaseId.CUTIN

    def __init__(self, config: CaseConfig) -> None:
        super().__init__(config)
        self._surrogate = get_follower("idm", config)
        self._subject = get_follower(self.subject_name, config)

    def exposure(self, events: EventBatch) -> ExposureModel:
        return build_histogram(events, self.space)

    def surrogate_outcome(self, cells: np.ndarray) -> CutinOutcome:
        values = self.space.cell_values(cells)
        return rollout_cutin(values, self._surrogate, self.config)

    def common_set(self, exposure: ExposureModel) -> tuple[CommonSet, dict[str, float]]:
        ndd, obj = self.config.ndd, self.config.objective
        omega = common_set_for(exposure, ndd.common_set_mode, ndd.common_set_threshold)
        factors = obj.u_f or normalization_factors(
            exposure, omega, obj.factor_precision
        )
        return omega, factors

    def build_library(
        self, exposure: ExposureModel, seed: int, **options: Any
    ) -> GridLibrary:
        cfg = self.config
        omega, factors = self.common_set(exposure)
        logger.info("Common set %s, factors %s.", omega, factors)

        def objective(cells: np.ndarray) -> np.ndarray:
            out = self.surrogate_outcome(cells)
            return cutin_objective_array(
                out.mnp_ettc, self.space.cell_values(cells), omega, factors,
                cfg.objective.w,
            )

        def crit(cells: np.ndarray) -> np.ndarray:
            accident = self.surrogate_outcome(cells).accident
            return criticality(accident, exposure.mass[cells])

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
        def accident(cells: np.ndarray) -> np.ndarray:
            values = self.space.cell_values(cells)
            return rollout_cutin(values, self._subject, self.config).accident

        return accident

    def library_sampler(self, library: Library, exposure: ExposureModel) -> Sampler:
        return build_sampler(library, exposure, self.config.sampling.epsilon)

    def baseline_sampler(self, exposure: ExposureModel) -> Sampler:
        return ndd_sampler(exposure)

    def ground_truth(self, exposure: ExposureModel, cap: int) -> float:
        return exhaustive_truth(self.space, self.subject(), exposure, cap)

    def accident_map(self, library: Library, exposure: ExposureModel):
        """Every cell: surrogate accident, mnpETTC, exposure and V."""
        self.check_library(library)
        cells = np.arange(self.space.total_count)
        out = self.surrogate_outcome(cells)
        values = self.space.cell_values(cells)
        v = criticality(out.accident, exposure.mass)
        member = np.zeros(len(cells), dtype=bool)
        member[library.cells] = True
        header = ("cell", *self.space.names, *ACCIDENT_MAP_COLUMNS)
        rows = [
            (int(c), *(float(x) for x in values[c]), int(out.accident[c]),
             float(out.mnp_ettc[c]), float(exposure.mass[c]), float(v[c]),
             int(member[c]))
            for c in cells
        ]
        return header, rows
