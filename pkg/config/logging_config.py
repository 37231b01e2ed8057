"""Logging configuration for heptainv.

Log records go to stderr (and optionally a rotating file) so that stdout
stays reserved for CSV and JSON artifacts. Library modules never print.

Usage:
    from config.logging_config import setup_logging, get_logger

    # Initialize once, at the command-line entry point
    setup_logging(debug=True)

    # Get logger in any module
    logger = get_logger(__name__)
    logger.debug("Factorized B for n=%d", n)
"""

import logging
import sys
import time
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from config.constants import STORAGE

ROOT_LOGGER_NAME = "heptainv"

# Module-level logger cache
_loggers: dict = {}
_initialized: bool = False


class HeptaInvFormatter(logging.Formatter):
    """Formatter with level colors when stderr is a terminal."""

    COLORS = {
        "DEBUG": "\033[36m",  # Cyan
        "INFO": "\033[32m",  # Green
        "WARNING": "\033[33m",  # Yellow
        "ERROR": "\033[31m",  # Red
        "CRITICAL": "\033[35m",  # Magenta
        "RESET": "\033[0m",
    }

    def __init__(self, use_colors: bool = True):
        self.use_colors = use_colors
        super().__init__(
            fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s", datefmt="%Y-%m-%d %H:%M:%S"
        )

    def format(self, record: logging.LogRecord) -> str:
        if self.use_colors and sys.stderr.isatty():
            # Copy so the file handler keeps the plain level name
            record = logging.makeLogRecord(record.__dict__)
            color = self.COLORS.get(record.levelname, "")
            record.levelname = f"{color}{record.levelname}{self.COLORS['RESET']}"
        return super().format(record)


def setup_logging(
    data_dir: Optional[Path] = None,
    debug: bool = False,
    console_output: bool = True,
    log_to_file: bool = False,
) -> logging.Logger:
    """Initialize the logging system.

    Should be called once by the entry point. Subsequent calls reconfigure
    the existing handlers.

    Args:
        data_dir: Directory for the log file. Defaults to ~/.heptainv/
        debug: Enable debug-level logging.
        console_output: Log to stderr.
        log_to_file: Also write a rotating log file under data_dir.

    Returns:
        The root logger for the package.

    Example:
        >>> logger = setup_logging(debug=True)
        >>> logger.debug("Logging ready")
    """
    global _initialized

    root_logger = logging.getLogger(ROOT_LOGGER_NAME)
    root_logger.setLevel(logging.DEBUG if debug else logging.INFO)
    root_logger.handlers.clear()
    root_logger.propagate = False

    if log_to_file:
        if data_dir is None:
            data_dir = Path.home() / STORAGE.DATA_DIR_NAME
        data_dir.mkdir(parents=True, exist_ok=True)

        file_handler = RotatingFileHandler(
            data_dir / STORAGE.LOG_FILE,
            maxBytes=STORAGE.LOG_MAX_BYTES,
            backupCount=STORAGE.LOG_BACKUP_COUNT,
            encoding="utf-8",
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            logging.Formatter(
                "%(asctime)s - %(name)s - %(levelname)s - %(message)s", datefmt="%Y-%m-%d %H:%M:%S"
            )
        )
        root_logger.addHandler(file_handler)

    if console_output:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.DEBUG if debug else logging.WARNING)
        console_handler.setFormatter(HeptaInvFormatter(use_colors=True))
        root_logger.addHandler(console_handler)

    root_logger.debug(
        "Logging initialized - level=%s, file=%s, console=%s",
        "DEBUG" if debug else "INFO",
        log_to_file,
        console_output,
    )

    _initialized = True
    return root_logger


def get_logger(name: str) -> logging.Logger:
    """Get a logger for a specific module.

    Returns a child of the 'heptainv' logger named after the last two parts
    of the module path, e.g. "banded.solver".

    Args:
        name: Usually __name__ of the calling module.

    Returns:
        A logger instance.
    """
    short_name = name
    if "." in name:
        short_name = ".".join(name.split(".")[-2:])

    if short_name not in _loggers:
        _loggers[short_name] = logging.getLogger(f"{ROOT_LOGGER_NAME}.{short_name}")

    return _loggers[short_name]


def log_exception(logger: logging.Logger, message: str, exc: Exception) -> None:
    """Log an exception with full traceback and context.

    Args:
        logger: The logger to use.
        message: Descriptive message about what was happening.
        exc: The exception that was caught.
    """
    logger.error(
        f"{message}: {type(exc).__name__}: {exc}",
        exc_info=True,
        extra={"exception_type": type(exc).__name__},
    )


def log_check_result(
    logger: logging.Logger, case: str, check: str, passed: bool, max_rel_error: float
) -> None:
    """Log one verification check, at WARNING level when it failed.

    Args:
        logger: The logger to use.
        case: Case label, e.g. "near/n=16".
        check: Check name.
        passed: Whether the check passed.
        max_rel_error: Worst relative error observed.
    """
    level = logging.DEBUG if passed else logging.WARNING
    logger.log(
        level,
        "Check %s [%s] -> %s (max_rel_error=%.3e)",
        check,
        case,
        "pass" if passed else "FAIL",
        max_rel_error,
    )


class LogContext:
    """Context manager for logging operation duration.

    Example:
        >>> with LogContext(logger, "Dense oracle n=128"):
        ...     dense_invert(matrix)
        # Logs: "Dense oracle n=128 completed in 41ms"
    """

    def __init__(self, logger: logging.Logger, operation: str, level: int = logging.DEBUG):
        self.logger = logger
        self.operation = operation
        self.level = level
        self.start_time: Optional[float] = None
        self.duration_ms: float = 0.0

    def __enter__(self):
        self.start_time = time.perf_counter()
        self.logger.log(self.level, f"{self.operation} starting...")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.duration_ms = (time.perf_counter() - self.start_time) * 1000

        if exc_type:
            self.logger.error(f"{self.operation} failed after {self.duration_ms:.0f}ms: {exc_val}")
        else:
            self.logger.log(self.level, f"{self.operation} completed in {self.duration_ms:.0f}ms")

        return False  # Don't suppress exceptions
