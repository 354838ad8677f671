from .exposure import ExposureModel, exposure_prob, uniform_exposure
from .library import (
    LIBRARY_ADAPTER,
    ZONE_COLLISION,
    ZONE_DANGEROUS,
    ZONE_SAFE,
    GridLibrary,
    Library,
    LibraryEntry,
    TreeLibrary,
)
from .space import ScenarioSpace, action_values, build_space

__all__ = [
    "LIBRARY_ADAPTER",
    "ZONE_COLLISION",
    "ZONE_DANGEROUS",
    "ZONE_SAFE",
    "ExposureModel",
    "GridLibrary",
    "Library",
    "LibraryEntry",
    "ScenarioSpace",
    "TreeLibrary",
    "action_values",
    "build_space",
    "exposure_prob",
    "uniform_exposure",
]
