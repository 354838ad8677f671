"""Per-case configuration.

Every constant of the three case studies lives here with its published
default.  ``CaseConfig.for_case`` builds the defaults in code; the YAML
documents under ``configs/cases/`` overlay them (``load_case_config``).

Naming: the learning rate of the TD update is ``alpha_lr`` and the
confidence level of the stopping rule is ``confidence``; IDM constants keep
the ``alpha``/``beta`` names of the car-following model.
"""

from __future__ import annotations

import math
from enum import StrEnum
from pathlib import Path
from typing import Any, Literal, Self

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from tslg.core.exceptions import ConfigurationError


class CaseId(StrEnum):
    CUTIN = "cutin"
    HIGHWAY_EXIT = "highway_exit"
    CAR_FOLLOWING = "car_following"


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


# ---------------------------------------------------------------------------
# Grid dimensions
# ---------------------------------------------------------------------------


class DimensionSpec(_Frozen):
    """One axis of a discretized grid."""

    name: str
    lower: float
    upper: float
    step: float = Field(gt=0)
    unit: str = ""
    lower_open: bool = Field(
        default=False,
        description="Half-open interval (lower, upper]: the lower bound is "
        "not a grid value.",
    )

    @model_validator(mode="after")
    def _check_bounds(self) -> Self:
        if not self.upper > self.lower:
            raise ValueError(
                f"dimension {self.name!r}: upper ({self.upper}) must exceed "
                f"lower ({self.lower})"
            )
        return self


# ---------------------------------------------------------------------------
# Vehicle models
# ---------------------------------------------------------------------------


class IdmParams(_Frozen):
    """Intelligent driver model constants (calibrated surrogate by default)."""

    alpha: float = Field(default=2.0, gt=0, description="Maximum acceleration α_IDM")
    beta: float = Field(default=18.0, gt=0, description="Desired speed β_IDM, m/s")
    c: float = Field(default=4.0, gt=0, description="Free-road exponent c_IDM")
    s0: float = Field(default=2.0, ge=0, description="Jam distance, m")
    length: float = Field(default=4.0, ge=0, description="L_IDM, m")
    headway: float = Field(default=1.0, ge=0, description="Time headway T, s")
    b: float = Field(default=3.0, gt=0, description="Comfortable deceleration")
    v_min: float = Field(default=2.0, ge=0)
    v_max: float = Field(default=40.0, gt=0)
    a_min: float = Field(default=-4.0, lt=0)
    a_max: float = Field(default=2.0, gt=0)
    d_acci: float = Field(default=1.0, gt=0, description="Accident range, m")

    @model_validator(mode="after")
    def _check_boxes(self) -> Self:
        if self.v_max < self.v_min:
            raise ValueError("v_max must not be below v_min")
        return self


class AccAebParams(_Frozen):
    """Subject under test: ACC law with an emergency-braking override."""

    acc: IdmParams = Field(
        default_factory=lambda: IdmParams(alpha=1.0, beta=30.0, headway=0.6, b=2.0),
        description="IDM-family cruise/following law",
    )
    aeb_ttc: float = Field(
        default=1.5,
        gt=0,
        description="Full braking when ETTC drops strictly below this, s",
    )


# ---------------------------------------------------------------------------
# Simulation, data, objective, search
# ---------------------------------------------------------------------------


class SimulationConfig(_Frozen):
    dt: float = Field(default=0.1, gt=0, description="Integration step, s")
    horizon: float = Field(default=10.0, gt=0, description="Cut-in episode, s")
    ego_speed: float = Field(default=30.0, gt=0, description="Initial ego speed")
    epoch: float = Field(default=1.0, gt=0, description="Lead control period, s")


class MixtureComponent(_Frozen):
    """Axis-aligned Gaussian component of the synthetic cut-in generator."""

    weight: float = Field(gt=0)
    mean: tuple[float, float]
    std: tuple[float, float]


def _cutin_mixture() -> list[MixtureComponent]:
    return [
        MixtureComponent(weight=0.57, mean=(13.0, 0.0), std=(4.0, 0.5)),
        MixtureComponent(weight=0.33, mean=(35.0, 0.0), std=(18.0, 1.0)),
        MixtureComponent(weight=0.05, mean=(20.0, -3.0), std=(10.0, 2.0)),
        # close, fast-closing cut-ins; peak cell mass stays below the
        # common-set threshold
        MixtureComponent(weight=0.05, mean=(6.0, -8.0), std=(3.5, 2.5)),
    ]


class NddConfig(_Frozen):
    """Synthetic naturalistic-data generator and exposure extraction."""

    n_events: int = Field(default=1_000_000, ge=1)
    n_free_driving: int = Field(default=1_000_000, ge=1)
    common_set_threshold: float = Field(default=1e-3, gt=0, lt=1)
    common_set_mode: Literal["threshold", "most_frequent"] = "threshold"
    cutin_mixture: list[MixtureComponent] = Field(default_factory=_cutin_mixture)
    cutin_range: tuple[float, float] = Field(
        default=(0.1, 90.0), description="Query bounds on R at cut-in, m"
    )
    cutin_speed: tuple[float, float] = Field(
        default=(2.0, 40.0), description="Query bounds on cut-in vehicle speed"
    )
    speed_mean: float = 30.0
    speed_std: float = 4.0
    speed_bounds: tuple[float, float] = (20.0, 40.0)
    headway_log_mean: float = Field(
        default=math.log(1.5), description="Log-normal time headway, log s"
    )
    headway_log_std: float = 0.45
    range_rate_std: float = 1.2
    action_std: float = 1.2
    action_bounds: tuple[float, float] = (-4.0, 2.0)
    action_step: float = 0.2


class ObjectiveConfig(_Frozen):
    w: float = Field(default=1.0, gt=0, le=1)
    u_i: float = Field(default=100.0, gt=0, description="mnpETTC normalization")
    u_f: dict[str, float] | None = Field(
        default=None,
        description="Per-dimension distance factors; derived from the "
        "exposure model when unset.",
    )
    u_s: float = Field(default=500.0, gt=0, description="Zone-area normalization")
    factor_precision: float = Field(
        default=1.0, gt=0, description="Derived factors are rounded up to this"
    )


class SearchConfig(_Frozen):
    starts: int = Field(default=50, ge=1)
    exploration_m: float = Field(default=1.0, ge=1)


class HighwayConfig(_Frozen):
    """Highway-exit geometry, lane-change grid and planners."""

    p0: float = 0.0
    v0: float = 30.0
    d_cf: float = Field(default=2.0, ge=0)
    exit_position: float = Field(default=200.0, gt=0, description="L, m")
    t_max: float = 10.0
    dt: float = Field(default=0.1, gt=0)
    dp: float = Field(default=5.0, gt=0)
    t_min: float = Field(default=0.5, ge=0, description="Safe gap, s")
    a_min: float = -4.0
    a_max: float = 2.0
    v_min: float = 20.0
    v_max: float = 40.0
    vehicle_length: float = Field(default=5.0, ge=0)
    politeness: float = Field(default=0.1, ge=0, le=1)
    sm_accelerations: tuple[float, ...] = (-4.0, -2.0, 0.0, 2.0)
    lane_idm: IdmParams = Field(
        default_factory=lambda: IdmParams(beta=33.0, v_min=0.0),
        description="Car-following law used inside the lane-change utility",
    )
    cav_accelerations: tuple[float, ...] = (-2.0, 0.0, 1.0)
    cav_t_min: float = Field(default=1.0, ge=0)
    cav_reaction_time: float = Field(default=1.0, ge=0)


class MdpConfig(_Frozen):
    horizon: int = Field(default=30, ge=1, description="Decision epochs")
    alpha_lr: float = Field(default=0.1, gt=0, le=1)
    delta0: float = Field(default=1e-10, gt=0)
    max_sweeps: int = Field(default=5000, ge=1)
    p_s_episodes: int = Field(default=1_000_000, ge=1)
    worst_case_action: float = -4.0
    lead_v_min: float = Field(default=2.0, ge=0)
    lead_v_max: float = Field(default=40.0, gt=0)


class SamplingConfig(_Frozen):
    epsilon: float = Field(gt=0, lt=1)
    beta: float = Field(gt=0, lt=1)
    confidence: float = Field(default=0.95, gt=0, lt=1)
    min_tests: int = Field(default=30, ge=2)
    max_tests: int = Field(default=2_000_000, ge=2)
    fixed_tests: int | None = Field(
        default=None,
        ge=2,
        description="Run exactly this many tests and skip the stopping rule",
    )


# ---------------------------------------------------------------------------
# Case config
# ---------------------------------------------------------------------------


class CaseConfig(_Frozen):
    """Everything a pipeline needs for one case study."""

    case: CaseId
    seed: int = 1
    space: list[DimensionSpec]
    actions: DimensionSpec | None = None
    fixed_params: dict[str, float] = Field(default_factory=dict)
    surrogate: IdmParams = Field(default_factory=IdmParams)
    subject: AccAebParams = Field(default_factory=AccAebParams)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    ndd: NddConfig = Field(default_factory=NddConfig)
    objective: ObjectiveConfig = Field(default_factory=ObjectiveConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    highway: HighwayConfig = Field(default_factory=HighwayConfig)
    mdp: MdpConfig = Field(default_factory=MdpConfig)
    sampling: SamplingConfig

    @model_validator(mode="after")
    def _check_case_shape(self) -> Self:
        if self.case is CaseId.CAR_FOLLOWING and self.actions is None:
            raise ValueError("car_following needs an action dimension")
        return self

    @classmethod
    def for_case(cls, case: CaseId | str, **overrides: Any) -> CaseConfig:
        """Published defaults for *case*, with keyword overrides."""
        try:
            case_id = CaseId(case)
        except ValueError as exc:
            raise ConfigurationError(f"unknown case id {case!r}") from exc
        data = _DEFAULTS[case_id]() | overrides
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            raise ConfigurationError(str(exc)) from exc

    def replace(self, **changes: Any) -> CaseConfig:
        """Validated copy with top-level fields swapped."""
        try:
            return CaseConfig.model_validate(self.model_dump() | changes)
        except ValidationError as exc:
            raise ConfigurationError(str(exc)) from exc


def _cutin_defaults() -> dict[str, Any]:
    return {
        "case": CaseId.CUTIN,
        "space": [
            DimensionSpec(
                name="range", lower=0.0, upper=90.0, step=2.0, unit="m",
                lower_open=True,
            ),
            DimensionSpec(
                name="range_rate", lower=-20.0, upper=10.0, step=0.4, unit="m/s"
            ),
        ],
        "fixed_params": {"ego_speed": 30.0},
        "objective": ObjectiveConfig(u_f={"range": 20.0, "range_rate": 18.0}),
        "sampling": SamplingConfig(epsilon=0.05, beta=0.3),
    }


def _highway_defaults() -> dict[str, Any]:
    position = {"lower": -100.0, "upper": 200.0, "step": 5.0, "unit": "m"}
    speed = {"lower": 20.0, "upper": 40.0, "step": 1.0, "unit": "m/s"}
    return {
        "case": CaseId.HIGHWAY_EXIT,
        "space": [
            DimensionSpec(name="bv1_position", **position),
            DimensionSpec(name="bv1_speed", **speed),
            DimensionSpec(name="bv2_position", **position),
            DimensionSpec(name="bv2_speed", **speed),
        ],
        "fixed_params": {"cav_position": 0.0, "cav_speed": 30.0},
        "ndd": NddConfig(common_set_mode="most_frequent"),
        "sampling": SamplingConfig(epsilon=0.10, beta=0.2),
    }


def _car_following_defaults() -> dict[str, Any]:
    return {
        "case": CaseId.CAR_FOLLOWING,
        "space": [
            DimensionSpec(name="bv_speed", lower=20.0, upper=40.0, step=1.0,
                          unit="m/s"),
            DimensionSpec(name="range", lower=0.0, upper=115.0, step=1.0,
                          unit="m", lower_open=True),
            DimensionSpec(name="range_rate", lower=-10.0, upper=8.0, step=1.0,
                          unit="m/s"),
        ],
        "actions": DimensionSpec(
            name="acceleration", lower=-4.0, upper=2.0, step=0.2, unit="m/s^2"
        ),
        "sampling": SamplingConfig(epsilon=0.1, beta=0.2),
    }


_DEFAULTS = {
    CaseId.CUTIN: _cutin_defaults,
    CaseId.HIGHWAY_EXIT: _highway_defaults,
    CaseId.CAR_FOLLOWING: _car_following_defaults,
}


def _deep_merge(base: dict[str, Any], overlay: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_case_config(case: CaseId | str, path: Path | None = None) -> CaseConfig:
    """Defaults for *case* overlaid with the YAML document at *path*.

    A document naming a different case is rejected.
    """
    config = CaseConfig.for_case(case)
    if path is None:
        return config
    try:
        overlay = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except OSError as exc:
        raise ConfigurationError(f"cannot read case config {path}: {exc}") from exc
    if not isinstance(overlay, dict):
        raise ConfigurationError(f"case config {path} must be a mapping")
    if overlay.get("case", config.case) != config.case:
        raise ConfigurationError(
            f"case config {path} is for {overlay['case']!r}, not {config.case!r}"
        )
    merged = _deep_merge(config.model_dump(mode="json"), overlay)
    try:
        return CaseConfig.model_validate(merged)
    except ValidationError as exc:
        raise ConfigurationError(str(exc)) from exc
