"""Application settings using pydantic-settings.

**Not a singleton**: each call to ``get_app_config()`` re-reads config
from disk.

Priority order (highest first):

1. Environment variables (``TSLG_`` prefix, ``__`` nesting)
2. ``.env`` dotenv file
3. ``configs/config.yaml``
4. Init defaults / field defaults
5. File secrets

Per-case constants are not part of these settings; they live in one YAML
document per case under ``cases_dir`` (see ``tslg.configs.case``).
"""

from pathlib import Path

from pydantic import Field
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    YamlConfigSettingsSource,
)

from .case import CaseConfig, CaseId, load_case_config
from .system import LoggingConfig, OutputConfig, RuntimeConfig, TracingConfig

# ---------------------------------------------------------------------------
# Path constants
# ---------------------------------------------------------------------------

CONFIG_PY_PATH = Path(__file__).resolve()
PROJECT_ROOT = CONFIG_PY_PATH.parent.parent.parent.parent
CONFIG_DIR = PROJECT_ROOT / "configs"

STATIC_CONFIG_FILE = CONFIG_DIR / "config.yaml"
CASES_DIR = CONFIG_DIR / "cases"

DOTENV_FILE_PATH = PROJECT_ROOT / ".env"
ENV_DELIMITER = "__"
ENV_PREFIX = "TSLG_"

DEFAULT_ENCODING = "utf-8"


class AppConfig(BaseSettings):
    """Application configuration."""

    model_config = SettingsConfigDict(
        env_file=DOTENV_FILE_PATH,
        env_file_encoding=DEFAULT_ENCODING,
        env_nested_delimiter=ENV_DELIMITER,
        env_prefix=ENV_PREFIX,
        case_sensitive=False,
        extra="ignore",
        yaml_file=STATIC_CONFIG_FILE,
        yaml_file_encoding=DEFAULT_ENCODING,
    )

    logging: LoggingConfig = Field(
        default_factory=LoggingConfig,
        description="Structured logging configuration",
    )

    tracing: TracingConfig = Field(
        default_factory=TracingConfig,
        description="OpenTelemetry tracing configuration",
    )

    output: OutputConfig = Field(
        default_factory=OutputConfig,
        description="Artifact output locations",
    )

    runtime: RuntimeConfig = Field(
        default_factory=RuntimeConfig,
        description="Worker pool and oracle limits",
    )

    cases_dir: Path = Field(
        default=CASES_DIR,
        description="Directory holding one <case>.yaml document per case",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (
            env_settings,
            dotenv_settings,
            YamlConfigSettingsSource(settings_cls),
            init_settings,
            file_secret_settings,
        )


def get_app_config() -> AppConfig:
    """Get the application configuration (re-read on every call)."""
    return AppConfig()


def get_case_config(case: CaseId | str, path: Path | None = None) -> CaseConfig:
    """Case constants from *path*, or from ``<cases_dir>/<case>.yaml`` if present."""
    case_id = CaseConfig.for_case(case).case
    if path is None:
        candidate = get_app_config().cases_dir / f"{case_id.value}.yaml"
        path = candidate if candidate.is_file() else None
    return load_case_config(case_id, path)
