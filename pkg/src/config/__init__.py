"""Configuration management.

Environment settings use pydantic-settings; run configs are YAML files
validated by pydantic models and patched with dotted overrides.
"""

from src.config.run_config import (
    DataConfig,
    EvalConfig,
    RunConfig,
    apply_overrides,
    build_run_config,
    load_run_config,
    parse_override,
)
from src.config.settings import Settings, get_settings

__all__ = [
    "DataConfig",
    "EvalConfig",
    "RunConfig",
    "Settings",
    "apply_overrides",
    "build_run_config",
    "get_settings",
    "load_run_config",
    "parse_override",
]
