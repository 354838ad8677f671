"""Naturalistic events as CSV.

One header ``case,kind,r,r_dot,v_lead,v_follow,v,u``; each row fills the
fields of its kind and leaves the rest empty.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path

import numpy as np

from tslg.configs.case import CaseId
from tslg.core.exceptions import ConfigurationError, DomainError, EmptyInputError
from tslg.core.ndd import EventBatch, QueryBounds

logger = logging.getLogger(__name__)

EVENT_COLUMNS = ("case", "kind", "r", "r_dot", "v_lead", "v_follow", "v", "u")

_KIND_FIELDS = {
    "cutin": ("r", "r_dot"),
    "trajectory": ("v_lead", "r", "v_follow"),
    "free_driving": ("v", "u"),
}


def write_events_csv(events: EventBatch, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EVENT_COLUMNS)
        for kind, table in (
            ("cutin", events.cutin),
            ("trajectory", events.trajectory),
            ("free_driving", events.free_driving),
        ):
            slots = [EVENT_COLUMNS.index(f) for f in _KIND_FIELDS[kind]]
            for values in table:
                row = [events.case.value, kind, "", "", "", "", "", ""]
                for slot, x in zip(slots, values, strict=True):
                    row[slot] = repr(float(x))
                writer.writerow(row)
    logger.info("Wrote %d events to %s.", len(events), path)
    return path


def read_events_csv(
    path: Path, case: CaseId | None = None, bounds: QueryBounds | None = None
) -> EventBatch:
    """Event batch from *path*; rows of another case or outside *bounds*
    (default ``QueryBounds()``) are an error."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"event file {path} does not exist")
    rows: dict[str, list[tuple[float, ...]]] = {k: [] for k in _KIND_FIELDS}
    lines: dict[str, list[int]] = {k: [] for k in _KIND_FIELDS}
    seen: CaseId | None = None
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != EVENT_COLUMNS:
            raise DomainError(f"{path}: header must be {','.join(EVENT_COLUMNS)}")
        for line, rec in enumerate(reader, start=2):
            try:
                row_case = CaseId(rec["case"])
                fields = _KIND_FIELDS[rec["kind"]]
                values = tuple(float(rec[f]) for f in fields)
            except (KeyError, ValueError) as exc:
                raise DomainError(f"{path}:{line}: malformed event row") from exc
            if seen is not None and row_case is not seen:
                raise DomainError(f"{path}:{line}: mixed cases {seen} and {row_case}")
            seen = row_case
            rows[rec["kind"]].append(values)
            lines[rec["kind"]].append(line)
    if seen is None:
        raise EmptyInputError(f"{path} holds no events")
    if case is not None and CaseId(case) is not seen:
        raise ConfigurationError(f"{path} holds {seen.value} events, not {case}")
    bounds = bounds or QueryBounds()
    for kind, values in rows.items():
        outside = np.flatnonzero(bounds.outside(kind, values))
        if outside.size:
            line = lines[kind][outside[0]]
            raise DomainError(f"{path}:{line}: {kind} event outside the query bounds")
    return EventBatch(
        case=seen,
        **{
            kind: np.array(values, dtype=float) if values else None
            for kind, values in rows.items()
        },
    )
