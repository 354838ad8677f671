"""Vehicle states and simulated trajectories."""

from __future__ import annotations

from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class VehicleState(BaseModel):
    model_config = ConfigDict(frozen=True)

    position: float = 0.0
    velocity: float
    acceleration: float = 0.0


class ActionBranch(BaseModel):
    """Car-following scenario: an initial state and the lead's action per epoch."""

    model_config = ConfigDict(frozen=True)

    state: tuple[float, float, float] = Field(
        description="(v_BV, R, Ṙ) in m/s, m, m/s"
    )
    actions: tuple[float, ...] = Field(min_length=1)


_SERIES = (
    "ego_position",
    "ego_velocity",
    "ego_acceleration",
    "lead_position",
    "lead_velocity",
    "lead_acceleration",
)


class Trajectory(BaseModel):
    """Ego/lead states sampled every ``dt`` seconds.

    ``accident_index`` is the first sample with R < d_acci; the series stop
    there.  ``entered_safe_zone`` marks car-following episodes stopped at an
    epoch boundary in the safe zone; ``truncated`` marks episodes cut by the
    horizon.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dt: float = Field(gt=0)
    ego_position: np.ndarray
    ego_velocity: np.ndarray
    ego_acceleration: np.ndarray
    lead_position: np.ndarray
    lead_velocity: np.ndarray
    lead_acceleration: np.ndarray
    accident_index: int | None = None
    entered_safe_zone: bool = False
    truncated: bool = False

    @model_validator(mode="after")
    def _check_series(self) -> Self:
        lengths = set()
        for name in _SERIES:
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            lengths.add(arr.shape)
        if len(lengths) != 1 or next(iter(lengths))[0] == 0:
            raise ValueError("trajectory series must be nonempty and aligned")
        return self

    def __len__(self) -> int:
        return len(self.ego_position)

    @property
    def accident(self) -> bool:
        return self.accident_index is not None

    @property
    def time(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt

    @property
    def range(self) -> np.ndarray:
        return self.lead_position - self.ego_position

    @property
    def range_rate(self) -> np.ndarray:
        return self.lead_velocity - self.ego_velocity

    @property
    def relative_acceleration(self) -> np.ndarray:
        return self.lead_acceleration - self.ego_acceleration

    def ego_state(self, k: int) -> VehicleState:
        return VehicleState(
            position=float(self.ego_position[k]),
            velocity=float(self.ego_velocity[k]),
            acceleration=float(self.ego_acceleration[k]),
        )

    def lead_state(self, k: int) -> VehicleState:
        return VehicleState(
            position=float(self.lead_position[k]),
            velocity=float(self.lead_velocity[k]),
            acceleration=float(self.lead_acceleration[k]),
        )
