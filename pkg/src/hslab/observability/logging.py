"""Structured JSON logging for hslab runs."""

from __future__ import annotations

import json
import logging
import logging.handlers
import os
import sys
import threading
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import TYPE_CHECKING, Any
from uuid import uuid4

from ..config import LogLevel

if TYPE_CHECKING:
    from ..quad.result import QuadratureResult

_RESERVED_ATTRS = frozenset(
    {
        "name",
        "msg",
        "args",
        "created",
        "filename",
        "funcName",
        "levelname",
        "levelno",
        "lineno",
        "module",
        "msecs",
        "pathname",
        "process",
        "processName",
        "relativeCreated",
        "thread",
        "threadName",
        "taskName",
        "exc_info",
        "exc_text",
        "stack_info",
    }
)


@dataclass
class RunContext:
    """Context information for one CLI run."""

    run_id: str
    command: str | None = None
    seed: int | None = None
    config_digest: str | None = None

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary, omitting None values."""
        return {k: v for k, v in asdict(self).items() if v is not None}


def current_run_context() -> RunContext | None:
    """Return the run context bound to the current thread, if any."""
    context = getattr(threading.current_thread(), "run_context", None)
    return context if isinstance(context, RunContext) else None


class JSONFormatter(logging.Formatter):
    """JSON formatter with run context and ``extra`` field support."""

    def __init__(self, include_process_info: bool = False):
        """Initialize formatter.

        Args:
            include_process_info: Whether to include process/thread info
        """
        super().__init__()
        self.include_process_info = include_process_info
        self.pid = os.getpid() if include_process_info else None

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_data: dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "location": {
                "file": record.pathname,
                "line": record.lineno,
                "function": record.funcName,
            },
        }

        if self.include_process_info:
            log_data["process"] = {
                "pid": self.pid,
                "thread_name": threading.current_thread().name,
            }

        context = current_run_context()
        if context is not None:
            log_data["context"] = context.to_dict()

        for key, value in record.__dict__.items():
            if key in _RESERVED_ATTRS:
                continue
            try:
                if hasattr(value, "to_dict"):
                    log_data[key] = value.to_dict()
                elif isinstance(
                    value, dict | list | tuple | str | int | float | bool | type(None)
                ):
                    log_data[key] = value
                else:
                    log_data[key] = str(value)
            except Exception:
                log_data[key] = repr(value)

        if record.exc_info and record.exc_info[0] is not None:
            log_data["exception"] = {
                "type": record.exc_info[0].__name__,
                "message": str(record.exc_info[1]),
                "traceback": self.formatException(record.exc_info),
            }

        return json.dumps(log_data, default=str)


class MetricsLogger:
    """Logger for numerical metrics."""

    def __init__(self, logger: logging.Logger):
        """Initialize metrics logger.

        Args:
            logger: Underlying logger instance
        """
        self.logger = logger

    def log_quadrature(self, label: str, result: QuadratureResult) -> None:
        """Log a completed integral; flagged results go out as warnings."""
        level = logging.WARNING if result.flags else logging.DEBUG
        self.logger.log(
            level,
            "quadrature_completed",
            extra={
                "metrics": {
                    "type": "quadrature",
                    "label": label,
                    "method": result.method.value,
                    "value": result.value,
                    "error_estimate": result.error_estimate,
                    "evaluations": result.evaluations,
                    "flags": list(result.flags),
                }
            },
        )

    def log_scan_point(
        self, kind: str, abscissa: float, quotient: float, certified_lower: float
    ) -> None:
        """Log one Rayleigh-quotient sample of a constant scan."""
        self.logger.info(
            "scan_point",
            extra={
                "metrics": {
                    "type": "scan",
                    "kind": kind,
                    "abscissa": abscissa,
                    "quotient": quotient,
                    "certified_lower": certified_lower,
                }
            },
        )

    def log_cache_metrics(self, hits: int, misses: int, evictions: int, size: int) -> None:
        """Log cache performance metrics."""
        hit_rate = (hits / (hits + misses) * 100) if (hits + misses) > 0 else 0
        self.logger.info(
            "cache_performance",
            extra={
                "metrics": {
                    "type": "cache",
                    "hits": hits,
                    "misses": misses,
                    "evictions": evictions,
                    "size": size,
                    "hit_rate": hit_rate,
                }
            },
        )


def setup_rotating_file_handlers(
    log_dir: Path, max_bytes: int = 10 * 1024 * 1024, backup_count: int = 5
) -> list[logging.Handler]:
    """Set up rotating file handlers.

    Args:
        log_dir: Directory for log files
        max_bytes: Maximum size per log file
        backup_count: Number of backup files to keep

    Returns:
        Handlers for all records and for errors only
    """
    log_dir.mkdir(parents=True, exist_ok=True)

    all_handler = logging.handlers.RotatingFileHandler(
        log_dir / "hslab.log",
        maxBytes=max_bytes,
        backupCount=backup_count,
        encoding="utf-8",
    )
    all_handler.setFormatter(JSONFormatter(include_process_info=True))

    error_handler = logging.handlers.RotatingFileHandler(
        log_dir / "hslab-errors.log",
        maxBytes=max_bytes,
        backupCount=backup_count,
        encoding="utf-8",
    )
    error_handler.setLevel(logging.ERROR)
    error_handler.setFormatter(JSONFormatter(include_process_info=True))

    return [all_handler, error_handler]


@contextmanager
def run_context(run_id: str | None = None, **kwargs: Any) -> Iterator[RunContext]:
    """Context manager binding run fields to every log record of this thread.

    Args:
        run_id: Run ID (generated if not provided)
        **kwargs: Additional context fields

    Example:
        with run_context(command="check-scaling", seed=7):
            logger.info("Starting run")
    """
    if run_id is None:
        run_id = str(uuid4())

    context = RunContext(run_id=run_id, **kwargs)

    thread = threading.current_thread()
    old_context = getattr(thread, "run_context", None)
    thread.run_context = context  # type: ignore[attr-defined]

    try:
        yield context
    finally:
        if old_context:
            thread.run_context = old_context  # type: ignore[attr-defined]
        else:
            delattr(thread, "run_context")


def setup_logging(
    log_level: LogLevel = LogLevel.INFO,
    log_dir: Path | None = None,
    enable_file_logging: bool = False,
) -> None:
    """Set up the logging system.

    Reports own stdout, so console records go to stderr.

    Args:
        log_level: Logging level
        log_dir: Directory for log files (if file logging enabled)
        enable_file_logging: Whether to enable file logging
    """
    level_map = {
        LogLevel.DEBUG: logging.DEBUG,
        LogLevel.INFO: logging.INFO,
        LogLevel.WARNING: logging.WARNING,
        LogLevel.ERROR: logging.ERROR,
        LogLevel.CRITICAL: logging.CRITICAL,
    }
    level = level_map.get(LogLevel(log_level), logging.INFO)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(JSONFormatter())
    handlers: list[logging.Handler] = [console_handler]

    if enable_file_logging and log_dir:
        handlers.extend(setup_rotating_file_handlers(log_dir))

    logging.basicConfig(level=level, handlers=handlers, force=True)

    package_logger = logging.getLogger("hslab")
    package_logger.setLevel(level)

    logging.getLogger(__name__).debug(
        "Logging system initialized",
        extra={
            "config": {
                "log_level": LogLevel(log_level).value,
                "file_logging": enable_file_logging,
                "log_dir": str(log_dir) if log_dir else None,
            }
        },
    )
