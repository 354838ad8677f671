"""Campaign results: final statistics and the per-test trace."""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from tslg.configs.case import CaseId

TRACE_COLUMNS = (
    "test_index",
    "scenario_id",
    "weight",
    "indicator",
    "mu_hat",
    "half_width",
)


class CampaignTrace(BaseModel):
    """One row per test, in index order."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scenario_ids: tuple[str, ...]
    weight: np.ndarray
    indicator: np.ndarray
    mu_hat: np.ndarray
    half_width: np.ndarray

    def __len__(self) -> int:
        return len(self.scenario_ids)

    def rows(self):
        for i, sid in enumerate(self.scenario_ids):
            yield (
                i + 1,
                sid,
                float(self.weight[i]),
                int(self.indicator[i]),
                float(self.mu_hat[i]),
                float(self.half_width[i]),
            )

    @classmethod
    def empty(cls) -> CampaignTrace:
        return cls(
            scenario_ids=(),
            weight=np.empty(0),
            indicator=np.empty(0, dtype=bool),
            mu_hat=np.empty(0),
            half_width=np.empty(0),
        )

    @classmethod
    def concat(cls, parts: list[CampaignTrace]) -> CampaignTrace:
        if not parts:
            return cls.empty()
        return cls(
            scenario_ids=tuple(sid for p in parts for sid in p.scenario_ids),
            weight=np.concatenate([p.weight for p in parts]),
            indicator=np.concatenate([p.indicator for p in parts]),
            mu_hat=np.concatenate([p.mu_hat for p in parts]),
            half_width=np.concatenate([p.half_width for p in parts]),
        )


class EvaluationReport(BaseModel):
    """Final statistics of one campaign.

    The trace is kept alongside but never serialized with the report.
    """

    model_config = ConfigDict(frozen=True)

    case: CaseId
    mode: Literal["library", "ndd"]
    subject: str
    seed: int
    n: int
    hits: int
    mu_hat: float
    variance: float
    half_width: float | None = Field(
        description="Relative half-width at the last test; null while μ̂ = 0"
    )
    converged: bool
    fixed_tests: int | None = None
    confidence: float
    beta: float
    epsilon: float | None = None
    batch_size: int
    explored: int = Field(default=0, description="Tests drawn off the library")
    trace: CampaignTrace = Field(
        default_factory=CampaignTrace.empty, exclude=True, repr=False
    )


def acceleration_ratio(library: EvaluationReport, baseline: EvaluationReport) -> float:
    """Tests the baseline needed per library test; a lower bound when the
    baseline stopped at its cap."""
    return baseline.n / library.n if library.n else float("inf")


class GroundTruth(BaseModel):
    """Exact accident rate from the exhaustive oracle."""

    model_config = ConfigDict(frozen=True)

    case: CaseId
    subject: str
    p_a: float
