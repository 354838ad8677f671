from .case import CaseConfig, CaseId, DimensionSpec, IdmParams, load_case_config
from .config import AppConfig, get_app_config, get_case_config

__all__ = [
    "AppConfig",
    "CaseConfig",
    "CaseId",
    "DimensionSpec",
    "IdmParams",
    "get_app_config",
    "get_case_config",
    "load_case_config",
]
