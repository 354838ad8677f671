"""Campaign reports, traces and accident maps."""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from tslg.core.evaluation import TRACE_COLUMNS, EvaluationReport


def write_report_json(report: EvaluationReport, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def write_rows_csv(
    header: Sequence[str], rows: Iterable[Sequence[Any]], path: Path
) -> Path:
    """CSV with floats written in their shortest round-trip form."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return path


def write_trace_csv(report: EvaluationReport, path: Path) -> Path:
    return write_rows_csv(TRACE_COLUMNS, report.trace.rows(), path)
