"""Centralized logging configuration with environment variable support."""

import os
import logging
import sys

try:
    from pythonjsonlogger import jsonlogger
except ImportError:
    jsonlogger = None


class LoggingConfig:
    """Centralized logging configuration."""

    LOG_LEVEL = os.environ.get("LOG_LEVEL", "WARNING").upper()
    LOG_FORMAT = os.environ.get("LOG_FORMAT", "json").lower()
    LOG_SLOW_OPERATION_THRESHOLD_MS = int(os.environ.get("LOG_SLOW_OPERATION_THRESHOLD_MS", "60000"))

    @classmethod
    def setup_logging(cls, level: str | None = None) -> None:
        """Configure logging based on environment variables.

        Logs go to stderr; stdout carries the CLI's JSON/CSV output.
        """
        level_name = (level or cls.LOG_LEVEL).upper()
        root_logger = logging.getLogger()
        root_logger.setLevel(getattr(logging, level_name, logging.WARNING))
        root_logger.handlers.clear()

        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(getattr(logging, level_name, logging.WARNING))

        if cls.LOG_FORMAT == "json" and jsonlogger is not None:
            formatter = jsonlogger.JsonFormatter(
                "%(asctime)s %(levelname)s %(name)s %(message)s"
            )
        else:
            formatter = logging.Formatter(
                '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
            )

        handler.setFormatter(formatter)
        root_logger.addHandler(handler)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance with the given name."""
    return logging.getLogger(name)
