from .common_set import (
    CommonSet,
    common_set_for,
    extract_common_set,
    most_frequent_common_set,
    normalization_factors,
)
from .events import EventBatch, EventRecord, QueryBounds
from .histogram import CF_POINT_SPACE, build_histogram, highway_exposure, mdp_exposure
from .synthetic import synth_events

__all__ = [
    "CF_POINT_SPACE",
    "CommonSet",
    "EventBatch",
    "EventRecord",
    "QueryBounds",
    "build_histogram",
    "common_set_for",
    "extract_common_set",
    "highway_exposure",
    "mdp_exposure",
    "most_frequent_common_set",
    "normalization_factors",
    "synth_events",
]
