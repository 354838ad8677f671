"""Case-id → pipeline lookup."""

from __future__ import annotations

from tslg.configs.case import CaseConfig, CaseId
from tslg.core.exceptions import ConfigurationError

from .base import CasePipeline
from .car_following import CarFollowingPipeline
from .cutin import CutinPipeline
from .highway import HighwayExitPipeline

_KNOWN_PIPELINES: dict[CaseId, type[CasePipeline]] = {
    CutinPipeline.pipeline_name: CutinPipeline,
    HighwayExitPipeline.pipeline_name: HighwayExitPipeline,
    CarFollowingPipeline.pipeline_name: CarFollowingPipeline,
}


def get_pipeline(config: CaseConfig) -> CasePipeline:
    """Pipeline bound to *config*'s case."""
    cls = _KNOWN_PIPELINES.get(config.case)
    if cls is None:
        raise ConfigurationError(f"case {config.case!r} has no pipeline")
    return cls(config)
