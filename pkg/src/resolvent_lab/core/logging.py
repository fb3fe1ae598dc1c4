"""Logging for CLI runs: progress lines on stderr, the full record in LOG_DIR/resolvent_lab.log."""

import logging
import sys
from pathlib import Path

from ..core.config import settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LOG_FILE = "resolvent_lab.log"

QUIET_LOGGERS = ("asyncio",)


def setup_logging(log_dir: str | Path | None = None, level: int | None = None) -> Path:
    """Configure the root logger and return the log file path.

    Each call replaces the previous handlers, so repeated runs in one process log to the
    directory current at the time of the call.
    """
    log_dir = Path(log_dir or settings.LOG_DIR)
    log_dir.mkdir(parents=True, exist_ok=True)
    log_file = log_dir / LOG_FILE

    if level is None:
        level = logging.DEBUG if settings.DEBUG else logging.INFO

    # stdout carries the report table
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        datefmt=DATE_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr), logging.FileHandler(log_file)],
        force=True,
    )
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)

    logging.getLogger(__name__).debug(f"Logging to {log_file} at level {logging.getLevelName(level)}")
    return log_file


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)
