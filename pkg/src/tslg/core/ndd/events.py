"""Naturalistic driving events.

``EventRecord`` is the row type (CSV ingestion, small hand-built inputs).
Generators and histograms work on ``EventBatch``, the same records held
column-wise in numpy arrays.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from typing import Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationInfo, model_validator

from tslg.configs.case import CaseConfig, CaseId
from tslg.core.exceptions import DomainError, EmptyInputError

EventKind = Literal["cutin", "trajectory", "free_driving"]

_REQUIRED: dict[str, tuple[str, ...]] = {
    "cutin": ("r", "r_dot"),
    "trajectory": ("v_lead", "r", "v_follow"),
    "free_driving": ("v", "u"),
}


def _open(x: np.ndarray, bounds: tuple[float, float]) -> np.ndarray:
    return (x > bounds[0]) & (x < bounds[1])


def _closed(x: np.ndarray, bounds: tuple[float, float]) -> np.ndarray:
    return (x >= bounds[0]) & (x <= bounds[1])


class QueryBounds(BaseModel):
    """Ranges naturalistic events must fall in.

    Cut-ins are bounded on R and on the cut-in vehicle speed, ego speed plus
    Ṙ, both open.  Car-following points and free-driving pairs are bounded
    on speed and acceleration, closed.
    """

    model_config = ConfigDict(frozen=True)

    cutin_range: tuple[float, float] = (0.1, 90.0)
    cutin_speed: tuple[float, float] = (2.0, 40.0)
    ego_speed: float = 30.0
    speed: tuple[float, float] = (20.0, 40.0)
    action: tuple[float, float] = (-4.0, 2.0)

    @classmethod
    def for_case(cls, config: CaseConfig) -> QueryBounds:
        ndd = config.ndd
        return cls(
            cutin_range=ndd.cutin_range,
            cutin_speed=ndd.cutin_speed,
            ego_speed=config.simulation.ego_speed,
            speed=ndd.speed_bounds,
            action=ndd.action_bounds,
        )

    def outside(self, kind: EventKind, rows: np.ndarray) -> np.ndarray:
        """Mask of the rows of *kind* that fall outside the bounds."""
        rows = np.asarray(rows, dtype=np.float64).reshape(-1, len(_REQUIRED[kind]))
        if kind == "cutin":
            r, r_dot = rows.T
            ok = _open(r, self.cutin_range)
            ok &= _open(self.ego_speed + r_dot, self.cutin_speed)
        elif kind == "trajectory":
            v_lead, r, v_follow = rows.T
            ok = _closed(v_lead, self.speed) & _closed(v_follow, self.speed) & (r > 0)
        else:
            v, u = rows.T
            ok = _closed(v, self.speed) & _closed(u, self.action)
        return ~ok


class EventRecord(BaseModel):
    """One event.

    * ``cutin``: range R (m) and range rate Ṙ (m/s) at the cut-in moment.
    * ``trajectory``: a car-following point (v_lead, R, v_follow).
    * ``free_driving``: a (v, u) speed/acceleration pair.

    Values must lie inside the ``QueryBounds`` passed as validation context
    ``{"bounds": ...}``, or the default bounds without one.
    """

    model_config = ConfigDict(frozen=True)

    case: CaseId
    kind: EventKind
    r: float | None = None
    r_dot: float | None = None
    v_lead: float | None = None
    v_follow: float | None = None
    v: float | None = None
    u: float | None = None

    @model_validator(mode="after")
    def _check_fields(self, info: ValidationInfo) -> Self:
        fields = _REQUIRED[self.kind]
        missing = [f for f in fields if getattr(self, f) is None]
        if missing:
            raise ValueError(f"{self.kind} event lacks {', '.join(missing)}")
        bounds = (info.context or {}).get("bounds") or QueryBounds()
        if bounds.outside(self.kind, [getattr(self, f) for f in fields])[0]:
            raise ValueError(f"{self.kind} event outside the query bounds")
        return self


def _column(values: np.ndarray | None, width: int) -> np.ndarray:
    arr = np.empty((0, width)) if values is None else np.asarray(values, float)
    arr = arr.reshape(-1, width)
    arr.setflags(write=False)
    return arr


class EventBatch(BaseModel):
    """Events of one case, column-wise.

    ``cutin`` rows are (R, Ṙ); ``trajectory`` rows are (v_lead, R, v_follow);
    ``free_driving`` rows are (v, u).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    case: CaseId
    cutin: np.ndarray | None = None
    trajectory: np.ndarray | None = None
    free_driving: np.ndarray | None = None

    @model_validator(mode="after")
    def _normalize(self) -> Self:
        object.__setattr__(self, "cutin", _column(self.cutin, 2))
        object.__setattr__(self, "trajectory", _column(self.trajectory, 3))
        object.__setattr__(self, "free_driving", _column(self.free_driving, 2))
        return self

    def __len__(self) -> int:
        return len(self.cutin) + len(self.trajectory) + len(self.free_driving)

    # ---- named observation columns ---------------------------------------

    def observations(self) -> dict[str, np.ndarray]:
        """Columns addressable by scenario-space dimension name."""
        columns: dict[str, np.ndarray] = {}
        if len(self.cutin):
            columns |= {"range": self.cutin[:, 0], "range_rate": self.cutin[:, 1]}
        if len(self.trajectory):
            v_lead, r, v_follow = self.trajectory.T
            columns |= {
                "v_lead": v_lead,
                "gap": r,
                "v_follow": v_follow,
                "bv_speed": v_lead,
                "range": r,
                "range_rate": v_lead - v_follow,
            }
        if not columns:
            raise EmptyInputError("event batch holds no cut-in or trajectory events")
        return columns

    # ---- row conversion --------------------------------------------------

    @classmethod
    def from_records(cls, records: Iterable[EventRecord]) -> EventBatch:
        rows: dict[str, list[tuple[float, ...]]] = {k: [] for k in _REQUIRED}
        case: CaseId | None = None
        for rec in records:
            if case is not None and rec.case != case:
                raise DomainError(f"mixed cases in event list: {case} and {rec.case}")
            case = rec.case
            rows[rec.kind].append(tuple(getattr(rec, f) for f in _REQUIRED[rec.kind]))
        if case is None:
            raise EmptyInputError("empty event list")
        return cls(
            case=case,
            cutin=np.array(rows["cutin"], dtype=float) if rows["cutin"] else None,
            trajectory=(
                np.array(rows["trajectory"], dtype=float)
                if rows["trajectory"]
                else None
            ),
            free_driving=(
                np.array(rows["free_driving"], dtype=float)
                if rows["free_driving"]
                else None
            ),
        )

    def records(self, bounds: QueryBounds | None = None) -> Iterator[EventRecord]:
        context = {"bounds": bounds}
        for kind, table in (
            ("cutin", self.cutin),
            ("trajectory", self.trajectory),
            ("free_driving", self.free_driving),
        ):
            fields = _REQUIRED[kind]
            for row in table:
                data = dict(zip(fields, row.tolist(), strict=True))
                yield EventRecord.model_validate(
                    {"case": self.case, "kind": kind, **data}, context=context
                )
