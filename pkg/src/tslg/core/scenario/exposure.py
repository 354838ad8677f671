"""Exposure models: naturalistic probability mass over scenarios."""

from __future__ import annotations

from typing import Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from tslg.core.exceptions import DomainError

from .space import ScenarioSpace

MASS_TOLERANCE = 1e-9


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


class ExposureModel(BaseModel):
    """Probability mass P(x|θ) over the cells of ``space``.

    The ``mdp`` kind reads ``mass`` as the state distribution P(s) and adds
    ``action_mass[s, u]`` = P(u|s) over the ``actions`` grid.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: ScenarioSpace
    mass: np.ndarray
    kind: Literal["grid", "mdp"] = "grid"
    actions: np.ndarray | None = None
    action_mass: np.ndarray | None = None
    rejected: int = 0

    @model_validator(mode="after")
    def _check_mass(self) -> Self:
        object.__setattr__(self, "mass", _frozen(self.mass))
        if self.mass.shape != (self.space.total_count,):
            raise DomainError(
                f"mass has shape {self.mass.shape}, expected "
                f"({self.space.total_count},)"
            )
        if (self.mass < 0).any():
            raise DomainError("exposure masses must be nonnegative")
        total = float(self.mass.sum())
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise DomainError(f"exposure masses sum to {total!r}, not 1")
        if self.kind == "mdp":
            self._check_actions()
        return self

    def _check_actions(self) -> None:
        if self.actions is None or self.action_mass is None:
            raise DomainError("mdp exposure needs actions and action_mass")
        object.__setattr__(self, "actions", _frozen(self.actions))
        object.__setattr__(self, "action_mass", _frozen(self.action_mass))
        expected = (self.space.total_count, len(self.actions))
        if self.action_mass.shape != expected:
            raise DomainError(
                f"action_mass has shape {self.action_mass.shape}, expected "
                f"{expected}"
            )
        if (self.action_mass < 0).any():
            raise DomainError("action masses must be nonnegative")
        rows = self.action_mass.sum(axis=1)
        observed = self.mass > 0
        if (np.abs(rows[observed] - 1.0) > MASS_TOLERANCE).any():
            raise DomainError("P(u|s) must sum to 1 for every state with P(s) > 0")

    @property
    def n_actions(self) -> int:
        return 0 if self.actions is None else len(self.actions)

    def action_index(self, value: float) -> int:
        """Index of the action grid value nearest to *value*."""
        if self.actions is None:
            raise DomainError("grid exposure has no actions")
        return int(np.abs(self.actions - value).argmin())


def exposure_prob(model: ExposureModel, cell: int | np.ndarray) -> float | np.ndarray:
    """P(x|θ) of *cell* (0 where the model holds no mass)."""
    model.space.check_cell(cell)
    value = model.mass[cell]
    return float(value) if np.ndim(value) == 0 else value


def uniform_exposure(space: ScenarioSpace) -> ExposureModel:
    n = space.total_count
    return ExposureModel(space=space, mass=np.full(n, 1.0 / n))
