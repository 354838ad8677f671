from .campaign import Subject, naive_baseline, run_campaign
from .estimator import (
    Estimate,
    RunningEstimator,
    estimate,
    relative_half_width,
    z_value,
)
from .oracle import episode_collision_prob, exhaustive_mdp_truth, exhaustive_truth
from .report import (
    TRACE_COLUMNS,
    CampaignTrace,
    EvaluationReport,
    GroundTruth,
    acceleration_ratio,
)
from .sampler import (
    DrawBatch,
    GridSampler,
    SampleDraw,
    Sampler,
    TreeSampler,
    build_sampler,
    grid_sampling_mass,
    ndd_sampler,
    sample_scenario,
    tree_sampling_mass,
)

__all__ = [
    "TRACE_COLUMNS",
    "CampaignTrace",
    "DrawBatch",
    "Estimate",
    "EvaluationReport",
    "GridSampler",
    "GroundTruth",
    "RunningEstimator",
    "SampleDraw",
    "Sampler",
    "Subject",
    "TreeSampler",
    "acceleration_ratio",
    "build_sampler",
    "episode_collision_prob",
    "estimate",
    "exhaustive_mdp_truth",
    "exhaustive_truth",
    "grid_sampling_mass",
    "naive_baseline",
    "ndd_sampler",
    "relative_half_width",
    "run_campaign",
    "sample_scenario",
    "tree_sampling_mass",
    "z_value",
]
