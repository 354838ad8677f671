from __future__ import annotations

from pathlib import Path

from pydantic import BaseModel, Field


class LoggingConfig(BaseModel):
    """Structured logging configuration."""

    level: str = Field(
        default="INFO",
        description="Root log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )
    json_output: bool = Field(
        default=True,
        description="Emit JSON lines. Set to false for human-readable output.",
    )


class TracingConfig(BaseModel):
    """OpenTelemetry tracing configuration."""

    enabled: bool = Field(
        default=False,
        description="Enable OpenTelemetry tracing export",
    )
    service_name: str = Field(
        default="tslg",
        description="Service name used in the trace provider resource",
    )
    endpoint: str = Field(
        default="",
        description="OTLP HTTP endpoint URL",
    )
    sample_rate: float = Field(
        default=1.0,
        ge=0.0,
        le=1.0,
        description="Trace sampling rate (0.0-1.0)",
    )


class OutputConfig(BaseModel):
    """Where commands write their artifacts."""

    dir: Path = Field(
        default=Path("runs"),
        description="Default output directory for libraries, reports and "
        "manifests. Override with TSLG_OUTPUT__DIR.",
    )


class RuntimeConfig(BaseModel):
    """Execution knobs that never change results."""

    workers: int = Field(
        default=1,
        ge=1,
        description="Default number of threads used to simulate campaign "
        "batches. Results are identical for any worker count.",
    )
    batch_size: int = Field(
        default=4096,
        ge=1,
        description="Tests simulated per deterministic batch. Part of the "
        "random-stream layout, so changing it changes the sampled tests.",
    )
    exhaustive_cell_cap: int = Field(
        default=100_000,
        ge=1,
        description="Largest scenario space the exhaustive oracle agrees to "
        "enumerate.",
    )
