"""Tabular decision process over a discretized state grid.

Transitions are deterministic: ``next_state[s, u]`` is a state index, or
one of the terminal codes ``COLLISION`` / ``SAFE``.  Rows are only
meaningful for dangerous states; the rows of terminal-zone states hold
their own terminal code.
"""

from __future__ import annotations

from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tslg.core.exceptions import DomainError
from tslg.core.scenario import (
    ZONE_COLLISION,
    ZONE_DANGEROUS,
    ZONE_SAFE,
    ScenarioSpace,
)

COLLISION = -1
SAFE = -2


class TabularMdp(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: ScenarioSpace
    actions: np.ndarray
    next_state: np.ndarray
    zones: np.ndarray
    horizon: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_tables(self) -> Self:
        n, a = self.space.total_count, len(self.actions)
        if self.next_state.shape != (n, a):
            raise DomainError(
                f"next_state has shape {self.next_state.shape}, expected {(n, a)}"
            )
        if self.zones.shape != (n,):
            raise DomainError(f"zones has shape {self.zones.shape}, expected ({n},)")
        if self.next_state.min() < SAFE or self.next_state.max() >= n:
            raise DomainError("next_state holds codes outside the state range")
        for name in ("actions", "next_state", "zones"):
            arr = np.array(getattr(self, name), copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        return self

    @property
    def n_states(self) -> int:
        return self.space.total_count

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def dangerous(self) -> np.ndarray:
        return np.flatnonzero(self.zones == ZONE_DANGEROUS)

    def terminal_code(self, states: np.ndarray) -> np.ndarray:
        """COLLISION/SAFE for terminal-zone states, the index otherwise."""
        states = np.asarray(states, dtype=np.int64)
        zone = self.zones[states]
        return np.where(
            zone == ZONE_COLLISION,
            COLLISION,
            np.where(zone == ZONE_SAFE, SAFE, states),
        )


def terminal_rows(zones: np.ndarray, n_actions: int) -> np.ndarray:
    """Transition table with every row set to its own terminal code."""
    codes = np.where(zones == ZONE_COLLISION, COLLISION, SAFE)
    return np.repeat(codes[:, None], n_actions, axis=1).astype(np.int64)
