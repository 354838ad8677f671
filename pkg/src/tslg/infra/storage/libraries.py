"""Library documents as JSON."""

from __future__ import annotations

import logging
from pathlib import Path

from pydantic import ValidationError

from tslg.configs.case import CaseId
from tslg.core.exceptions import ConfigurationError, LibraryMismatchError
from tslg.core.scenario import LIBRARY_ADAPTER, Library

logger = logging.getLogger(__name__)


def save_library(library: Library, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(LIBRARY_ADAPTER.dump_json(library, indent=1) + b"\n")
    logger.info(
        "Wrote %s library (%d entries) to %s.", library.kind, library.size, path
    )
    return path


def load_library(path: Path, case: CaseId | str | None = None) -> Library:
    """Library at *path*, checked against *case* when given."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"library file {path} does not exist")
    try:
        library = LIBRARY_ADAPTER.validate_json(path.read_bytes())
    except ValidationError as exc:
        raise LibraryMismatchError(f"{path} is not a valid library: {exc}") from exc
    if case is not None and library.case is not CaseId(case):
        raise LibraryMismatchError(
            f"{path} is a {library.case.value} library, not {CaseId(case).value}"
        )
    return library
