"""Machine-readable run reports."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

from ..exceptions import ConfigError

SCHEMA_VERSION = "1.0"


@dataclass
class Report:
    """Outcome of one run: config echo, results and collected warnings."""

    command: str
    config: dict[str, Any]
    results: Any = field(default_factory=list)
    wall_time: float = 0.0
    warnings: list[str] = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "wall_time": self.wall_time,
            "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Report:
        return cls(
            command=data["command"],
            config=data["config"],
            results=data["results"],
            wall_time=data["wall_time"],
            warnings=list(data["warnings"]),
            schema_version=data["schema_version"],
        )

    def results_json(self) -> str:
        """Canonical text of the results section."""
        return json.dumps(self.results, sort_keys=True)


class WarningCollector(logging.Handler):
    """Collects WARNING records of the ``hslab`` loggers during a run."""

    def __init__(self) -> None:
        super().__init__(level=logging.WARNING)
        self.messages: list[str] = []

    def emit(self, record: logging.LogRecord) -> None:
        message = record.getMessage()
        if message not in self.messages:
            self.messages.append(message)


def _tables(node: Any, path: str = "") -> list[tuple[str, list[dict[str, Any]]]]:
    """Every ``table`` list in a results tree, with its location."""
    found: list[tuple[str, list[dict[str, Any]]]] = []
    if isinstance(node, dict):
        for key, value in node.items():
            where = f"{path}.{key}" if path else key
            if key == "table" and isinstance(value, list):
                found.append((path or "results", value))
            else:
                found.extend(_tables(value, where))
    elif isinstance(node, list):
        for i, value in enumerate(node):
            found.extend(_tables(value, f"{path}[{i}]"))
    return found


def to_csv(report: Report) -> str:
    """Rows of every tabular payload; a ``section`` column appears when there are several."""
    tables = _tables(report.results)
    rows: list[dict[str, Any]] = []
    for where, table in tables:
        for row in table:
            rows.append({"section": where, **row} if len(tables) > 1 else dict(row))
    columns: list[str] = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def to_json(report: Report) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True)


def emit(
    report: Report,
    format: Literal["json", "csv"] = "json",
    path: str | Path | None = None,
) -> str:
    """Render ``report`` and write it to ``path`` when given.

    Raises:
        ConfigError: If the output path cannot be written
    """
    text = to_csv(report) if format == "csv" else to_json(report)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as e:
            raise ConfigError(f"cannot write report to {path}: {e}") from e
    return text


def parse(text: str) -> Report:
    return Report.from_dict(json.loads(text))
