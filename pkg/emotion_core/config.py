"""Application configuration using Pydantic Settings."""
from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import dotenv_values
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Pipeline settings loaded from environment variables, .env and config files."""

    # Randomness
    seed: int = 42

    # Ingest / split
    max_rating: float = 5.0
    test_fraction: float = 0.2

    # Popularity thresholds
    score_quantile: float = 0.5
    count_quantile: float = 0.5

    # Training
    dim: int = 16
    learning_rate: float = 0.005
    emotion_weight: float = 0.01
    epochs: int = 20
    init_scale: float = 0.1
    cosine_floor: float = 1e-6
    norm_floor: float = 1e-12

    # Evaluation
    top_k: int = 10
    ranking_size: int = 10
    dme_users: str = "test"

    # Rendering
    max_width: int = 1024
    max_height: int = 1024
    colormap: str = "viridis"
    pooling: str = "mean"

    # Output
    output_dir: str = "outputs"

    # Logging Settings
    log_level: str = "INFO"
    log_format: str = "%(levelname)s: %(message)s"
    log_file: Optional[str] = None

    model_config = SettingsConfigDict(
        env_prefix="EMOTION_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",  # Unrelated variables in .env must not crash the CLI
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


def load_settings(config_file: Optional[str] = None) -> Settings:
    """Build settings with an optional key=value config file layered over the environment.

    Keys in the file use the field names (``dim=32``) or their ``EMOTION_``
    prefixed form. Init values beat environment values in pydantic-settings,
    which gives file-over-environment precedence.
    """
    if not config_file:
        return get_settings()

    path = Path(config_file)
    if not path.is_file():
        # Raised as OSError so the entry point maps it to the I/O exit code
        raise FileNotFoundError(f"Config file not found: {path}")

    overrides = {}
    for key, value in dotenv_values(path).items():
        if value is None:
            continue
        name = key.lower()
        if name.startswith("emotion_"):
            name = name[len("emotion_"):]
        overrides[name] = value
    return Settings(**overrides)
