"""
Configuration management for the DDG construction toolkit
"""

import logging
import os
from logging.handlers import RotatingFileHandler
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

_REPO_ROOT = os.path.dirname(os.path.abspath(__file__))


class Settings:
    """Toolkit settings and configuration."""

    APP_NAME: str = "ddg-forge"
    DEBUG: bool = os.getenv("DEBUG", "False").lower() == "true"

    # Fixtures
    FIXTURE_ROOT: str = os.getenv("DDG_FIXTURE_ROOT", os.path.join(_REPO_ROOT, "fixtures"))

    # Size caps
    DESIGN_POINT_CAP: int = int(os.getenv("DESIGN_POINT_CAP", "100000"))
    PAIR_CHECK_MAX_POINTS: int = int(os.getenv("PAIR_CHECK_MAX_POINTS", "2048"))
    LATIN_ENUM_MAX_SIDE: int = int(os.getenv("LATIN_ENUM_MAX_SIDE", "8"))
    CANONICAL_MAX_VERTICES: int = int(os.getenv("CANONICAL_MAX_VERTICES", "512"))
    AUT_MAX_VERTICES: int = int(os.getenv("AUT_MAX_VERTICES", "128"))
    # Above this size spectra are certified through modular ranks plus an
    # exact annihilating-polynomial check instead of Bareiss elimination.
    BAREISS_MAX_VERTICES: int = int(os.getenv("BAREISS_MAX_VERTICES", "128"))
    CANONICAL_REPORT_MAX: int = int(os.getenv("CANONICAL_REPORT_MAX", "128"))

    # Classification
    CLASSIFY_WORKERS: int = int(os.getenv("CLASSIFY_WORKERS", "0"))  # 0 = serial

    # Reports
    REPORT_SCHEMA: int = 1

    # Logging settings
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE: Optional[str] = os.getenv("LOG_FILE")
    LOG_MAX_SIZE: int = int(os.getenv("LOG_MAX_SIZE", "10485760"))  # 10MB
    LOG_BACKUP_COUNT: int = int(os.getenv("LOG_BACKUP_COUNT", "5"))

    # Cache settings
    CACHE_TTL: int = int(os.getenv("CACHE_TTL", "0"))  # 0 = no expiry

    @classmethod
    def validate_config(cls):
        """Validate configuration settings."""
        errors = []

        if cls.DESIGN_POINT_CAP < 4:
            errors.append("DESIGN_POINT_CAP must be at least 4")

        if not 2 <= cls.LATIN_ENUM_MAX_SIDE <= 9:
            errors.append("LATIN_ENUM_MAX_SIDE must lie in 2..9")

        if cls.CANONICAL_MAX_VERTICES < 1:
            errors.append("CANONICAL_MAX_VERTICES must be positive")

        if cls.CLASSIFY_WORKERS < 0:
            errors.append("CLASSIFY_WORKERS cannot be negative")

        if not isinstance(logging.getLevelName(cls.LOG_LEVEL.upper()), int):
            errors.append(f"LOG_LEVEL {cls.LOG_LEVEL!r} is not a logging level")

        if errors:
            raise ValueError(f"Configuration errors: {', '.join(errors)}")

        return True


def setup_logging(level: Optional[str] = None) -> None:
    """Install console logging and, when LOG_FILE is set, a rotating file log."""
    root = logging.getLogger()
    root.setLevel((level or settings.LOG_LEVEL).upper())
    formatter = logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")

    if not any(isinstance(h, logging.StreamHandler) and not isinstance(h, RotatingFileHandler)
               for h in root.handlers):
        console = logging.StreamHandler()
        console.setFormatter(formatter)
        root.addHandler(console)

    if settings.LOG_FILE and not any(isinstance(h, RotatingFileHandler) for h in root.handlers):
        log_dir = os.path.dirname(settings.LOG_FILE)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        file_handler = RotatingFileHandler(
            settings.LOG_FILE,
            maxBytes=settings.LOG_MAX_SIZE,
            backupCount=settings.LOG_BACKUP_COUNT,
        )
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)


# Create global settings instance
settings = Settings()

# Validate configuration on import
try:
    settings.validate_config()
except ValueError as e:
    print(f"Warning: {e}")
