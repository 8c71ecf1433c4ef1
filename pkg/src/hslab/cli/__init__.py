"""Command-line surface: run configs, dispatch and reports."""

from .report import Report, emit, parse
from .runconfig import Command, RunConfig, load_config
from .runner import collect_flags, run, validation_message

__all__ = [
    "Command",
    "Report",
    "RunConfig",
    "collect_flags",
    "emit",
    "load_config",
    "parse",
    "run",
    "validation_message",
]
