"""Process settings loaded from the environment and a ``.env`` file."""

from functools import lru_cache
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Environment-level settings (prefix ``LVSM_``).

    Attributes:
        log_level: Logging level
        log_file: Optional path to a log file
        config_path: Run config used when ``--config`` is not given
        output_dir: Default root for run outputs
        deterministic: Force 64-bit sequential verification mode
        acceptance: Apply full-scale thresholds in slow acceptance tests
    """

    model_config = SettingsConfigDict(
        env_prefix="LVSM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    log_level: str = "INFO"
    log_file: Optional[str] = None
    config_path: str = "config/default.yaml"
    output_dir: str = "runs"
    deterministic: bool = False
    acceptance: bool = False


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance.

    Returns:
        Settings instance
    """
    return Settings()
