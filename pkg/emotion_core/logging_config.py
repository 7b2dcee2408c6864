import logging
import sys
from pathlib import Path
from typing import Optional

from emotion_core.config import Settings, get_settings


def setup_logging(settings: Optional[Settings] = None, level: Optional[str] = None):
    """Configure package-wide logging.

    Diagnostics go to stderr as ``LEVEL: message`` lines so stdout stays free
    for command output.
    """
    settings = settings or get_settings()
    level_name = (level or settings.log_level).upper()

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.log_file:
        log_file_path = Path(settings.log_file)
        log_file_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file_path, encoding="utf-8"))

    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=settings.log_format,
        handlers=handlers,
        force=True,  # Override any existing configuration
    )

    logger = logging.getLogger("emotion_core")
    logger.debug("Logging initialized.")
    return logger


def get_logger(name: str):
    """Get a named logger."""
    return logging.getLogger(f"emotion_core.{name}")
