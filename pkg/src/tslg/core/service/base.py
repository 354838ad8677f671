"""Abstract case pipeline."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import Any, ClassVar

from tslg.configs.case import CaseConfig, CaseId
from tslg.core.evaluation import (
    EvaluationReport,
    Sampler,
    Subject,
    naive_baseline,
    run_campaign,
)
from tslg.core.exceptions import ConfigurationError, DomainError, LibraryMismatchError
from tslg.core.ndd import EventBatch, synth_events
from tslg.core.scenario import ExposureModel, Library, build_space

logger = logging.getLogger(__name__)

ACCIDENT_MAP_COLUMNS = ("sm_event", "challenge", "exposure", "v", "in_library")


class CasePipeline(ABC):
    """Data, library and evaluation steps of one case study.

    Each concrete pipeline binds a ``CaseConfig`` of its own case and knows
    how to turn events into an exposure model, how to build a library and
    how to sample and judge test scenarios.
    """

    pipeline_name: ClassVar[CaseId]
    subject_name: ClassVar[str] = "acc_aeb"

    def __init__(self, config: CaseConfig) -> None:
        if config.case is not self.pipeline_name:
            raise ConfigurationError(
                f"{type(self).__name__} cannot run case {config.case.value!r}"
            )
        self.config = config
        self.space = build_space(config)

    def generate_events(self, n: int, seed: int) -> EventBatch:
        return synth_events(self.config, n, seed)

    @abstractmethod
    def exposure(self, events: EventBatch) -> ExposureModel:
        """Exposure model of this case from naturalistic events."""

    @abstractmethod
    def build_library(
        self, exposure: ExposureModel, seed: int, **options: Any
    ) -> Library:
        """Critical-scenario library under the surrogate model."""

    @abstractmethod
    def library_sampler(self, library: Library, exposure: ExposureModel) -> Sampler:
        """ε-greedy sampler over *library*."""

    @abstractmethod
    def baseline_sampler(self, exposure: ExposureModel) -> Sampler:
        """Naturalistic sampler for the NDD baseline."""

    @abstractmethod
    def ground_truth(self, exposure: ExposureModel, cap: int) -> float:
        """Exact accident rate of the subject, refused above *cap* cells."""

    def subject(self) -> Subject | None:
        """Accident indicator of the subject, for grid draws."""
        return None

    def check_library(self, library: Library) -> None:
        if library.case is not self.pipeline_name:
            raise LibraryMismatchError(
                f"library is for case {library.case.value!r}, "
                f"not {self.pipeline_name.value!r}"
            )
        if library.space != self.space:
            raise LibraryMismatchError("library grid differs from the case grid")

    def evaluate(
        self,
        library: Library,
        exposure: ExposureModel,
        seed: int,
        *,
        workers: int = 1,
        batch_size: int = 4096,
    ) -> EvaluationReport:
        self.check_library(library)
        return run_campaign(
            self.library_sampler(library, exposure),
            self.subject(),
            self.config.sampling,
            case=self.pipeline_name,
            subject_name=self.subject_name,
            seed=seed,
            batch_size=batch_size,
            workers=workers,
        )

    def baseline(
        self,
        exposure: ExposureModel,
        seed: int,
        *,
        workers: int = 1,
        batch_size: int = 4096,
    ) -> EvaluationReport:
        sampler = self.baseline_sampler(exposure)
        return naive_baseline(
            exposure,
            self.subject(),
            self.config.sampling,
            case=self.pipeline_name,
            subject_name=self.subject_name,
            seed=seed,
            mdp=getattr(sampler, "mdp", None),
            batch_size=batch_size,
            workers=workers,
        )

    def accident_map(
        self, library: Library, exposure: ExposureModel
    ) -> tuple[tuple[str, ...], list[tuple[Any, ...]]]:
        """Header and rows of the per-cell surrogate outcome."""
        raise DomainError(f"case {self.pipeline_name.value!r} has no accident map")
