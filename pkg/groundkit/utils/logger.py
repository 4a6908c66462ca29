"""
Logging utilities for GROUNDKIT

Logs go to stderr: commands write predictions and reports to stdout or files.
"""

import logging
import sys
import time
from contextlib import contextmanager
from typing import Iterator, Optional

DEBUG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s"
PLAIN_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

# numerical libraries we call into
QUIET_LOGGERS = ("numpy", "scipy", "matplotlib")


def get_logger(name: str, debug: bool = False) -> logging.Logger:
    """
    Get a logger for a GROUNDKIT module

    Args:
        name: Logger name (usually __name__)
        debug: Enable debug logging; also upgrades a logger created earlier without it

    Returns:
        Configured logger
    """
    logger = logging.getLogger(name)

    if logger.handlers:
        if debug and logger.level != logging.DEBUG:
            logger.setLevel(logging.DEBUG)
            for handler in logger.handlers:
                handler.setFormatter(logging.Formatter(DEBUG_FORMAT))
        return logger

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(DEBUG_FORMAT if debug else PLAIN_FORMAT))
    logger.setLevel(logging.DEBUG if debug else logging.INFO)
    logger.addHandler(handler)
    logger.propagate = False

    return logger


def setup_logging(debug: bool = False, log_file: Optional[str] = None) -> None:
    """
    Set the level of every GROUNDKIT logger, optionally mirroring them to a file

    Args:
        debug: Enable debug logging
        log_file: Optional log file path
    """
    level = logging.DEBUG if debug else logging.INFO
    file_handler = logging.FileHandler(log_file, encoding="utf-8") if log_file else None
    if file_handler is not None:
        file_handler.setFormatter(logging.Formatter(DEBUG_FORMAT if debug else PLAIN_FORMAT))

    for name in ["groundkit", *logging.Logger.manager.loggerDict]:
        if not name.startswith("groundkit"):
            continue
        logger = logging.getLogger(name)
        logger.setLevel(level)
        if file_handler is not None and file_handler not in logger.handlers:
            logger.addHandler(file_handler)

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)


@contextmanager
def log_duration(logger: logging.Logger, label: str) -> Iterator[None]:
    """Log how long the wrapped block took, at INFO"""
    start = time.perf_counter()
    try:
        yield
    finally:
        logger.info(f"⏱️  {label}: {time.perf_counter() - start:.2f}s")
