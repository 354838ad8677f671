"""Run manifests.

A manifest records what a command read and wrote, each file with its
SHA-256, next to the configuration snapshot and seeds.  Timestamps live
here and nowhere else, so command outputs stay byte-reproducible.
"""

from __future__ import annotations

import hashlib
import logging
from datetime import datetime
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from tslg import __version__
from tslg.core.exceptions import ConfigurationError
from tslg.infra.id_utils import generate_id

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = ".manifest.json"
_BLOCK = 1 << 20


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        while block := fh.read(_BLOCK):
            digest.update(block)
    return digest.hexdigest()


class FileDigest(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: str
    sha256: str

    @classmethod
    def of(cls, path: Path) -> FileDigest:
        return cls(path=str(path), sha256=sha256_file(path))


class RunManifest(BaseModel):
    """Everything needed to re-run one command."""

    run_id: str = Field(default_factory=lambda: generate_id("run"))
    command: str
    argv: list[str]
    case_config: dict[str, Any] | None = None
    seeds: dict[str, int] = Field(default_factory=dict)
    inputs: list[FileDigest] = Field(default_factory=list)
    outputs: list[FileDigest] = Field(default_factory=list)
    tool_version: str = __version__
    started_at: datetime
    timings: dict[str, float] = Field(
        default_factory=dict, description="Wall-clock seconds per step"
    )


def manifest_path(output: Path) -> Path:
    output = Path(output)
    return output.with_name(output.name + MANIFEST_SUFFIX)


def write_manifest(manifest: RunManifest, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote run manifest %s to %s.", manifest.run_id, path)
    return path


def read_manifest(path: Path) -> RunManifest:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"manifest {path} does not exist")
    try:
        return RunManifest.model_validate_json(path.read_bytes())
    except ValidationError as exc:
        raise ConfigurationError(f"{path} is not a run manifest: {exc}") from exc


def compare_outputs(manifest: RunManifest) -> list[tuple[str, bool]]:
    """(path, identical) for every recorded output against the file on disk."""
    results = []
    for item in manifest.outputs:
        path = Path(item.path)
        same = path.is_file() and sha256_file(path) == item.sha256
        results.append((item.path, same))
    return results
