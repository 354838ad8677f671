"""Critical-scenario libraries.

Two variants share one JSON document format (discriminated by ``kind``):

* ``GridLibrary``: critical cells with their criticality V and the
  normalization W = ΣV.
* ``TreeLibrary``: a converged Q-table over the car-following MDP with its
  zone labels.  Only rows holding a nonzero Q are stored.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Annotated, Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator

from tslg.configs.case import CaseId

from .space import ScenarioSpace

W_RELATIVE_TOLERANCE = 1e-12

ZONE_SAFE = 0
ZONE_DANGEROUS = 1
ZONE_COLLISION = 2


class LibraryEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    cell: int = Field(ge=0)
    v: float = Field(ge=0)


class GridLibrary(BaseModel):
    """Critical set Φ over a grid space."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["grid"] = "grid"
    case: CaseId
    space: ScenarioSpace
    gamma: float = Field(ge=0)
    entries: tuple[LibraryEntry, ...]
    w: float = Field(ge=0)

    @model_validator(mode="after")
    def _check_entries(self) -> Self:
        for entry in self.entries:
            if not entry.v > self.gamma:
                raise ValueError(
                    f"cell {entry.cell} has V={entry.v!r} not above γ={self.gamma!r}"
                )
        total = math.fsum(e.v for e in self.entries)
        if abs(total - self.w) > W_RELATIVE_TOLERANCE * max(total, self.w):
            raise ValueError(f"w={self.w!r} differs from ΣV={total!r}")
        self.space.check_cell(np.array([e.cell for e in self.entries], dtype=np.int64))
        return self

    @classmethod
    def from_values(
        cls,
        case: CaseId,
        space: ScenarioSpace,
        gamma: float,
        cells: np.ndarray,
        values: np.ndarray,
    ) -> GridLibrary:
        """Library from parallel arrays, entries sorted by cell index."""
        order = np.argsort(cells, kind="stable")
        entries = tuple(
            LibraryEntry(cell=int(cells[i]), v=float(values[i])) for i in order
        )
        return cls(
            case=case,
            space=space,
            gamma=gamma,
            entries=entries,
            w=math.fsum(e.v for e in entries),
        )

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def coverage(self) -> float:
        """Fraction of the space held in the library."""
        return self.size / self.space.total_count

    @cached_property
    def cells(self) -> np.ndarray:
        return np.array([e.cell for e in self.entries], dtype=np.int64)

    @cached_property
    def values(self) -> np.ndarray:
        return np.array([e.v for e in self.entries], dtype=np.float64)


class QRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    state: int = Field(ge=0)
    q: tuple[float, ...]


class ZoneLabels(BaseModel):
    """Non-safe states by zone; every other state is safe."""

    model_config = ConfigDict(frozen=True)

    collision: tuple[int, ...]
    dangerous: tuple[int, ...]


class TreeLibrary(BaseModel):
    """Converged Q-table of the car-following MDP."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["tree"] = "tree"
    case: CaseId
    space: ScenarioSpace
    actions: tuple[float, ...]
    horizon: int = Field(ge=1)
    q_table: tuple[QRow, ...]
    zones: ZoneLabels
    p_s: float = Field(ge=0, le=1, description="Monte Carlo P(S)")
    normalization: float = Field(
        ge=0, description="Branch-independent factor of the branch criticality"
    )

    @model_validator(mode="after")
    def _check_rows(self) -> Self:
        width = len(self.actions)
        for row in self.q_table:
            if len(row.q) != width:
                raise ValueError(f"row {row.state} has {len(row.q)} actions")
            if min(row.q) < 0.0 or max(row.q) > 1.0:
                raise ValueError(f"row {row.state} leaves [0, 1]")
        return self

    @classmethod
    def from_arrays(
        cls,
        case: CaseId,
        space: ScenarioSpace,
        actions: np.ndarray,
        horizon: int,
        q: np.ndarray,
        zones: np.ndarray,
        p_s: float,
        normalization: float,
    ) -> TreeLibrary:
        nonzero = np.flatnonzero(q.any(axis=1))
        return cls(
            case=case,
            space=space,
            actions=tuple(float(a) for a in actions),
            horizon=horizon,
            q_table=tuple(
                QRow(state=int(s), q=tuple(float(v) for v in q[s])) for s in nonzero
            ),
            zones=ZoneLabels(
                collision=tuple(
                    int(s) for s in np.flatnonzero(zones == ZONE_COLLISION)
                ),
                dangerous=tuple(
                    int(s) for s in np.flatnonzero(zones == ZONE_DANGEROUS)
                ),
            ),
            p_s=p_s,
            normalization=normalization,
        )

    @property
    def size(self) -> int:
        """Number of dangerous states with nonzero criticality."""
        return len(self.q_table)

    @cached_property
    def q_matrix(self) -> np.ndarray:
        q = np.zeros((self.space.total_count, len(self.actions)))
        for row in self.q_table:
            q[row.state] = row.q
        q.setflags(write=False)
        return q

    @cached_property
    def zone_map(self) -> np.ndarray:
        zones = np.full(self.space.total_count, ZONE_SAFE, dtype=np.int8)
        zones[list(self.zones.dangerous)] = ZONE_DANGEROUS
        zones[list(self.zones.collision)] = ZONE_COLLISION
        zones.setflags(write=False)
        return zones


Library = Annotated[GridLibrary | TreeLibrary, Field(discriminator="kind")]

LIBRARY_ADAPTER: TypeAdapter[GridLibrary | TreeLibrary] = TypeAdapter(Library)
