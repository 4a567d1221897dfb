"""
Logging configuration for verification runs.

Provides colored console output for interactive runs and JSON-lines
output for pipelines that consume check lifecycle events.
"""

import copy
import json
import logging
import sys
from datetime import datetime, timezone
from typing import Optional

# Attributes every LogRecord carries; anything else arrived through ``extra``.
_RECORD_ATTRIBUTES = frozenset(
    vars(logging.LogRecord('', 0, '', 0, '', (), None)).keys()
) | {'message', 'asctime'}


class ColoredFormatter(logging.Formatter):
    """Custom formatter with colors for terminal output."""

    COLORS = {
        'DEBUG': '\033[36m',  # Cyan
        'INFO': '\033[32m',  # Green
        'WARNING': '\033[33m',  # Yellow
        'ERROR': '\033[31m',  # Red
        'CRITICAL': '\033[35m',  # Magenta
    }
    RESET = '\033[0m'

    def format(self, record: logging.LogRecord) -> str:
        # Other handlers share the record
        record = copy.copy(record)
        color = self.COLORS.get(record.levelname, self.RESET)
        record.levelname = f"{color}{record.levelname:8}{self.RESET}"
        record.name = f"\033[34m{record.name}\033[0m"

        return super().format(record)


class JSONFormatter(logging.Formatter):
    """JSON formatter for structured logging, one object per line."""

    def format(self, record: logging.LogRecord) -> str:
        log_object = {
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }

        if record.exc_info:
            log_object['exception'] = self.formatException(record.exc_info)

        for key, value in record.__dict__.items():
            if key not in _RECORD_ATTRIBUTES:
                log_object[key] = value

        return json.dumps(log_object, default=str)


def setup_logging(
        level: str = "INFO",
        log_file: Optional[str] = None,
        enable_colors: bool = True,
        json_lines: bool = False,
) -> None:
    """
    Configure logging for a verification run.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional file path to write logs to
        enable_colors: Whether to use colored output in terminal
        json_lines: Emit JSON objects on the console instead of text
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    root_logger.handlers.clear()

    # Console goes to stderr: stdout carries the report summary
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.DEBUG)

    if json_lines:
        console_format = JSONFormatter()
    elif enable_colors:
        console_format = ColoredFormatter(
            fmt='%(asctime)s │ %(levelname)s │ %(name)s │ %(message)s',
            datefmt='%H:%M:%S'
        )
    else:
        console_format = logging.Formatter(
            fmt='%(asctime)s | %(levelname)-8s | %(name)s | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

    console_handler.setFormatter(console_format)
    root_logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_format = logging.Formatter(
            fmt='%(asctime)s | %(levelname)-8s | %(name)s | %(funcName)s:%(lineno)d | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        file_handler.setFormatter(file_format)
        root_logger.addHandler(file_handler)

    # Set levels for noisy libraries
    logging.getLogger('jax').setLevel(logging.WARNING)
    logging.getLogger('absl').setLevel(logging.WARNING)

    logger = logging.getLogger('homogeneous_operators')
    logger.debug("=" * 60)
    logger.debug(f"Logging initialized at {level} level")
    logger.debug("=" * 60)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance with the given name.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Configured logger instance
    """
    return logging.getLogger(name)


def log_check_start(logger: logging.Logger, check_id: str, parameters: dict) -> None:
    """Log the start of a verification check."""
    logger.info(
        f"Starting check '{check_id}'",
        extra={
            'check_id': check_id,
            'event': 'check_start',
            'parameters': parameters,
        }
    )


def log_check_complete(
        logger: logging.Logger,
        check_id: str,
        status: str,
        residual: Optional[float],
        elapsed_ms: float,
) -> None:
    """Log completion of a verification check."""
    shown = "exact" if residual is None else f"{residual:.3e}"
    logger.info(
        f"Check '{check_id}' finished: {status} (residual {shown}, {elapsed_ms:.1f} ms)",
        extra={
            'check_id': check_id,
            'event': 'check_complete',
            'status': status,
            'residual': residual,
            'elapsed_ms': elapsed_ms,
        }
    )


def log_check_error(logger: logging.Logger, check_id: str, error: Exception) -> None:
    """Log a check that raised."""
    logger.error(
        f"Check '{check_id}' raised: {error}",
        extra={
            'check_id': check_id,
            'event': 'check_error',
            'error_type': type(error).__name__,
        },
        exc_info=True
    )
