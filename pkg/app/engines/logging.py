import asyncio
import functools
import json
import logging
import logging.handlers
import sys
from datetime import datetime
from pathlib import Path
from typing import IO, Optional

# Rotating log files land in <project root>/logs when a file is requested
LOGS_DIR = Path(__file__).resolve().parent.parent.parent / "logs"


class CustomFormatter(logging.Formatter):
    """
    JSON formatter with timestamp, level, call site and optional structured data
    """
    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            "timestamp": datetime.fromtimestamp(record.created).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
            "message": record.getMessage(),
        }

        if hasattr(record, "extra_data"):
            log_data["extra"] = record.extra_data

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data, default=str)


def setup_logging(
    level: str = "INFO",
    log_file: Optional[str] = None,
    max_size: int = 10 * 1024 * 1024,  # 10MB
    backup_count: int = 5,
    stream: Optional[IO[str]] = None,
) -> None:
    """
    Setup process-wide logging configuration

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Name of a rotating log file under LOGS_DIR; no file when None
        max_size: Maximum size of each log file in bytes
        backup_count: Number of backup files to keep
        stream: Console stream, stdout by default (the CLI passes stderr)
    """
    logger = logging.getLogger()
    logger.setLevel(level.upper())
    logger.handlers = []

    console_handler = logging.StreamHandler(stream or sys.stdout)
    console_handler.setFormatter(CustomFormatter())
    logger.addHandler(console_handler)

    if log_file:
        LOGS_DIR.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            LOGS_DIR / log_file,
            maxBytes=max_size,
            backupCount=backup_count,
            encoding="utf-8",
        )
        file_handler.setFormatter(CustomFormatter())
        logger.addHandler(file_handler)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance with the given name

    Args:
        name: Name of the logger (usually __name__ or a class name)

    Returns:
        logging.Logger: Configured logger instance
    """
    return logging.getLogger(name)


class LoggerMixin:
    """
    Mixin class to add logging capabilities to any class
    """
    @property
    def logger(self) -> logging.Logger:
        if not hasattr(self, "_logger"):
            self._logger = get_logger(self.__class__.__name__)
        return self._logger


def _preview(value: object, limit: int = 200) -> str:
    text = str(value)
    return text if len(text) <= limit else text[:limit] + "..."


def log_function_call(func):
    """
    Decorator to log calls with (shortened) parameters and results.
    Handles both sync and async functions.
    """
    logger = get_logger(func.__module__)

    def _details(args, kwargs) -> dict:
        return {
            "function": func.__name__,
            "args": _preview(args),
            "kwargs": _preview(kwargs),
        }

    @functools.wraps(func)
    def sync_wrapper(*args, **kwargs):
        logger.debug(f"Calling {func.__name__}", extra={"extra_data": _details(args, kwargs)})
        try:
            result = func(*args, **kwargs)
            logger.debug(
                f"Completed {func.__name__}",
                extra={"extra_data": {"result": _preview(result)}},
            )
            return result
        except Exception as e:
            logger.error(
                f"Error in {func.__name__}",
                exc_info=True,
                extra={"extra_data": {"error": str(e)}},
            )
            raise

    @functools.wraps(func)
    async def async_wrapper(*args, **kwargs):
        logger.debug(f"Calling {func.__name__}", extra={"extra_data": _details(args, kwargs)})
        try:
            result = await func(*args, **kwargs)
            logger.debug(
                f"Completed {func.__name__}",
                extra={"extra_data": {"result": _preview(result)}},
            )
            return result
        except Exception as e:
            logger.error(
                f"Error in {func.__name__}",
                exc_info=True,
                extra={"extra_data": {"error": str(e)}},
            )
            raise

    if asyncio.iscoroutinefunction(func):
        return async_wrapper
    return sync_wrapper
