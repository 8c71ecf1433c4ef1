"""Unit tests for run reports."""

import json
import logging

import pytest

from hslab.cli.report import Report, WarningCollector, emit, parse, to_csv
from hslab.exceptions import ConfigError


def _report(results):
    return Report(command="envelope", config={"command": "envelope"}, results=results)


class TestCsv:
    """Test tabular output."""

    def test_single_table(self):
        """Test that a single table has no section column."""
        report = _report({"table": [{"p": 1.0, "q": 2.0}, {"p": 1.5, "q": 3.0}]})
        assert to_csv(report) == "p,q\n1.0,2.0\n1.5,3.0\n"

    def test_several_tables(self):
        """Test the section column when several tables are present."""
        report = _report(
            {
                "lhs": {"table": [{"p": 1.0, "ratio": 0.5}]},
                "rhs": {"table": [{"p": 1.0, "ratio": 0.25}]},
            }
        )
        lines = to_csv(report).splitlines()
        assert lines[0] == "section,p,ratio"
        assert lines[1:] == ["lhs,1.0,0.5", "rhs,1.0,0.25"]

    def test_tables_inside_lists(self):
        """Test table locations inside lists."""
        report = _report({"criteria": [{"table": [{"x": 1}]}, {"table": [{"x": 2}]}]})
        lines = to_csv(report).splitlines()
        assert lines[1:] == ["criteria[0],1", "criteria[1],2"]


class TestJson:
    """Test JSON output."""

    def test_parse(self):
        """Test that a rendered report parses back."""
        report = _report({"fitted_slope": 0.25, "flags": []})
        report.warnings = ["flag: inner_bias"]
        parsed = parse(emit(report))
        assert parsed.to_dict() == report.to_dict()
        assert parsed.schema_version == "1.0"

    def test_results_json_is_canonical(self):
        """Test that key order does not change the results text."""
        a = _report({"a": 1, "b": 2})
        b = _report({"b": 2, "a": 1})
        assert a.results_json() == b.results_json()

    def test_emit_to_file(self, tmp_path):
        """Test writing the report to a path."""
        path = tmp_path / "report.json"
        text = emit(_report({}), "json", path)
        assert json.loads(path.read_text()) == json.loads(text)

    def test_unwritable_path(self, tmp_path):
        """Test that unwritable outputs raise ConfigError."""
        with pytest.raises(ConfigError):
            emit(_report({}), "json", tmp_path / "missing" / "report.json")


class TestWarningCollector:
    """Test collection of warnings during a run."""

    def test_collects_distinct_warnings(self):
        """Test that only distinct warnings at WARNING or above are kept."""
        collector = WarningCollector()
        logger = logging.getLogger("hslab.test_report")
        logger.addHandler(collector)
        try:
            logger.warning("Envelope violates the nonzero integrable presumption")
            logger.warning("Envelope violates the nonzero integrable presumption")
            logger.info("Fitted dilation exponent")
            logger.error("Dilation experiment aborted")
        finally:
            logger.removeHandler(collector)
        assert collector.messages == [
            "Envelope violates the nonzero integrable presumption",
            "Dilation experiment aborted",
        ]
