"""Application configuration loaded from environment variables."""
import logging
import logging.config
import os
from functools import lru_cache
from pathlib import Path
from typing import Optional

import yaml
from pydantic import PositiveInt, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

log = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent
DEFAULT_LOG_CONFIG = PROJECT_ROOT / "configs" / "logging_config.yaml"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseSettings):
    """Settings loaded from TEMPOFLOW_* environment variables (or .env)."""

    # Oracle guards
    budget: PositiveInt = 200_000
    enumeration_budget: PositiveInt = 1_000_000

    # Bound c on the number of distinct static edge lengths
    max_distinct_lengths: PositiveInt = 3

    # verify subcommand
    verify_workers: PositiveInt = 1

    # Logging
    log_level: str = "WARNING"
    log_config: str = str(DEFAULT_LOG_CONFIG)

    model_config = SettingsConfigDict(env_prefix="TEMPOFLOW_", env_file=".env", extra="ignore")

    @field_validator("log_level")
    @classmethod
    def known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {', '.join(LOG_LEVELS)}, got {value!r}")
        return level


@lru_cache
def get_settings() -> Settings:
    return Settings()


def configure_logging(settings: Optional[Settings] = None, json_output: bool = False) -> None:
    """
    Configure logging from the YAML dictConfig.

    Args:
        settings: Settings to read the config path and level from
        json_output: Use the JSON formatter on the stream handler
    """
    settings = settings or get_settings()
    level = settings.log_level

    if not os.path.exists(settings.log_config):
        logging.basicConfig(level=level, format="%(asctime)s | %(levelname)-5s | %(name)s | %(message)s")
        log.debug(f"[CONFIG] No logging config at {settings.log_config}, using basicConfig")
        return

    with open(settings.log_config, "r", encoding="utf-8") as f:
        config = yaml.safe_load(f)

    if json_output:
        config["handlers"]["streamHandler"]["formatter"] = "jsonFormatter"
    config.setdefault("loggers", {}).setdefault("tempoflow", {})["level"] = level

    logging.config.dictConfig(config)
