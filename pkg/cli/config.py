"""Per-invocation settings of the CLI."""

from __future__ import annotations

from pathlib import Path

from pydantic import BaseModel, Field

from tslg.configs import AppConfig


class CLIConfig(BaseModel):
    """Execution knobs resolved from flags, falling back to ``AppConfig``."""

    output_dir: Path = Field(description="Default directory for command outputs")
    workers: int = Field(default=1, ge=1, description="Campaign worker threads")
    batch_size: int = Field(default=4096, ge=1, description="Tests per batch")
    cell_cap: int = Field(default=100_000, ge=1, description="Exhaustive oracle cap")
    record_manifest: bool = Field(
        default=True, description="Write a run manifest next to each output"
    )

    @classmethod
    def resolve(
        cls,
        app: AppConfig,
        workers: int | None = None,
        batch_size: int | None = None,
        record_manifest: bool = True,
    ) -> CLIConfig:
        return cls(
            output_dir=app.output.dir,
            workers=workers or app.runtime.workers,
            batch_size=batch_size or app.runtime.batch_size,
            cell_cap=app.runtime.exhaustive_cell_cap,
            record_manifest=record_manifest,
        )

    def default_output(self, case: str, name: str) -> Path:
        return self.output_dir / case / name
