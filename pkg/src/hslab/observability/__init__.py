"""Observability helpers: structured logging and metric events."""

from .logging import (
    JSONFormatter,
    MetricsLogger,
    RunContext,
    current_run_context,
    run_context,
    setup_logging,
)

__all__ = [
    "JSONFormatter",
    "MetricsLogger",
    "RunContext",
    "current_run_context",
    "run_context",
    "setup_logging",
]
