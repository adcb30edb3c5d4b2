"""Logging setup: console, rotating main log, and a per-iteration log."""

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

LOG_FORMAT = "%(asctime)s | %(name)s | %(levelname)s | %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

MAIN_LOG = "confoundlab.log"
ITERATION_LOG = "permutations.log"

# Loggers that emit one line per permutation iteration.
ITERATION_LOGGERS = ("workflow.permutation",)

_MAX_BYTES = 10 * 1024 * 1024
_BACKUPS = 5


def _rotating_handler(path: Path, level: int, formatter: logging.Formatter) -> RotatingFileHandler:
    handler = RotatingFileHandler(str(path), maxBytes=_MAX_BYTES, backupCount=_BACKUPS, encoding="utf-8")
    handler.setLevel(level)
    handler.setFormatter(formatter)
    return handler


def setup_logging(
    level: int = logging.INFO,
    log_dir: Optional[str | Path] = None,
    console_enabled: bool = True,
) -> Path:
    """Configure root logging and return the log directory.

    Args:
        level: Level for the console and the main log.
        log_dir: Directory for log files. Defaults to ./data/logs.
        console_enabled: Also log to stderr.

    Iteration loggers always write DEBUG to ``permutations.log``; only their
    records at ``level`` or above reach the main log and console.
    """
    log_dir = Path(log_dir or "./data/logs")
    log_dir.mkdir(parents=True, exist_ok=True)
    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT)

    root = logging.getLogger()
    root.setLevel(level)
    root.handlers.clear()
    if console_enabled:
        console = logging.StreamHandler()
        console.setLevel(level)
        console.setFormatter(formatter)
        root.addHandler(console)
    root.addHandler(_rotating_handler(log_dir / MAIN_LOG, level, formatter))

    iteration_handler = _rotating_handler(log_dir / ITERATION_LOG, logging.DEBUG, formatter)
    for name in ITERATION_LOGGERS:
        iteration_logger = logging.getLogger(name)
        iteration_logger.handlers.clear()
        iteration_logger.setLevel(logging.DEBUG)
        iteration_logger.addHandler(iteration_handler)

    logging.getLogger(__name__).debug("Logging initialized: level=%s, dir=%s", level, log_dir)
    return log_dir
