"""Tests for observability features."""

import json
import logging
import sys
import threading
from unittest.mock import Mock

from hslab.config import LogLevel
from hslab.observability import (
    JSONFormatter,
    MetricsLogger,
    current_run_context,
    run_context,
    setup_logging,
)
from hslab.quad.result import QuadMethod, QuadratureResult


def _record(level=logging.INFO, msg="Test", exc_info=None, **extra):
    record = logging.LogRecord(
        name="test.logger",
        level=level,
        pathname="test.py",
        lineno=42,
        msg=msg,
        args=(),
        exc_info=exc_info,
        func="test_function",
    )
    for key, value in extra.items():
        setattr(record, key, value)
    return record


class TestJSONFormatter:
    """Test JSON formatter."""

    def test_basic_formatting(self):
        """Test basic log formatting."""
        data = json.loads(JSONFormatter().format(_record(msg="Test message")))

        assert data["level"] == "INFO"
        assert data["logger"] == "test.logger"
        assert data["message"] == "Test message"
        assert data["location"] == {
            "file": "test.py",
            "line": 42,
            "function": "test_function",
        }
        assert "context" not in data
        assert "process" not in data

    def test_with_run_context(self):
        """Test that run fields are attached inside run_context."""
        with run_context(run_id="run123", command="check-scaling", seed=7):
            data = json.loads(JSONFormatter().format(_record()))

        assert data["context"] == {
            "run_id": "run123",
            "command": "check-scaling",
            "seed": 7,
        }

    def test_extra_fields(self):
        """Test serialisation of extra fields."""
        result = QuadratureResult(1.0, 0.1, QuadMethod.ADAPTIVE_1D, 5)
        record = _record(theta=0.5, flags=["inner_bias"], result=result, other=object())
        data = json.loads(JSONFormatter().format(record))

        assert data["theta"] == 0.5
        assert data["flags"] == ["inner_bias"]
        assert data["result"]["method"] == "adaptive_1d"
        assert data["other"].startswith("<object")

    def test_with_exception(self):
        """Test formatting with exception info."""
        try:
            raise ValueError("Test error")
        except ValueError:
            exc_info = sys.exc_info()

        data = json.loads(
            JSONFormatter().format(_record(logging.ERROR, "Error occurred", exc_info))
        )

        assert data["exception"]["type"] == "ValueError"
        assert data["exception"]["message"] == "Test error"
        assert "Traceback" in data["exception"]["traceback"]

    def test_process_info(self):
        """Test optional process information."""
        data = json.loads(JSONFormatter(include_process_info=True).format(_record()))
        assert data["process"]["thread_name"] == threading.current_thread().name


class TestRunContext:
    """Test run context binding."""

    def test_generated_run_id(self):
        """Test that a run ID is generated when none is given."""
        with run_context() as context:
            assert current_run_context() is context
            assert len(context.run_id) == 36
        assert current_run_context() is None

    def test_nesting_restores_outer_context(self):
        """Test that leaving an inner context restores the outer one."""
        with run_context(run_id="outer") as outer:
            with run_context(run_id="inner"):
                assert current_run_context().run_id == "inner"
            assert current_run_context() is outer

    def test_thread_local(self):
        """Test that other threads do not see the context."""
        seen = []
        with run_context(run_id="main"):
            worker = threading.Thread(target=lambda: seen.append(current_run_context()))
            worker.start()
            worker.join()
        assert seen == [None]


class TestMetricsLogger:
    """Test metrics logger."""

    def test_quadrature_metrics(self):
        """Test that unflagged quadratures log at debug level."""
        mock_logger = Mock()
        result = QuadratureResult(2.0, 1e-9, QuadMethod.POLAR_RADIAL, 21)
        MetricsLogger(mock_logger).log_quadrature("target", result)

        level, message = mock_logger.log.call_args[0]
        metrics = mock_logger.log.call_args[1]["extra"]["metrics"]
        assert level == logging.DEBUG
        assert message == "quadrature_completed"
        assert metrics["method"] == "polar_radial"
        assert metrics["evaluations"] == 21

    def test_flagged_quadrature_warns(self):
        """Test that flagged quadratures log as warnings."""
        mock_logger = Mock()
        result = QuadratureResult(
            2.0, 0.5, QuadMethod.MC_PAIRS, 100, flags=("infinite_variance",)
        )
        MetricsLogger(mock_logger).log_quadrature("gagliardo", result)

        assert mock_logger.log.call_args[0][0] == logging.WARNING
        metrics = mock_logger.log.call_args[1]["extra"]["metrics"]
        assert metrics["flags"] == ["infinite_variance"]

    def test_scan_point(self):
        """Test scan point metrics."""
        mock_logger = Mock()
        MetricsLogger(mock_logger).log_scan_point("ordinary", 1.5, 3.0, 2.9)

        mock_logger.info.assert_called_once()
        assert mock_logger.info.call_args[0][0] == "scan_point"
        metrics = mock_logger.info.call_args[1]["extra"]["metrics"]
        assert metrics == {
            "type": "scan",
            "kind": "ordinary",
            "abscissa": 1.5,
            "quotient": 3.0,
            "certified_lower": 2.9,
        }

    def test_cache_metrics(self):
        """Test cache metrics and the hit rate in percent."""
        mock_logger = Mock()
        MetricsLogger(mock_logger).log_cache_metrics(3, 1, 0, 4)

        metrics = mock_logger.info.call_args[1]["extra"]["metrics"]
        assert metrics["hit_rate"] == 75.0
        assert metrics["size"] == 4

    def test_cache_metrics_without_lookups(self):
        """Test a zero hit rate when nothing was looked up."""
        mock_logger = Mock()
        MetricsLogger(mock_logger).log_cache_metrics(0, 0, 0, 0)

        assert mock_logger.info.call_args[1]["extra"]["metrics"]["hit_rate"] == 0


def _reset_root():
    root = logging.getLogger()
    for handler in root.handlers[:]:
        root.removeHandler(handler)
        handler.close()
    logging.getLogger("hslab").setLevel(logging.NOTSET)


class TestSetupLogging:
    """Test logging setup."""

    def test_level_and_stderr(self):
        """Test that the package logger level follows the setting."""
        setup_logging(LogLevel.WARNING)
        try:
            assert logging.getLogger("hslab").level == logging.WARNING
            handler = logging.getLogger().handlers[0]
            assert handler.stream is sys.stderr
            assert isinstance(handler.formatter, JSONFormatter)
        finally:
            _reset_root()

    def test_file_handlers(self, tmp_path):
        """Test rotating file handlers."""
        setup_logging(LogLevel.INFO, log_dir=tmp_path, enable_file_logging=True)
        try:
            logging.getLogger("hslab.test").error("written")
            for handler in logging.getLogger().handlers:
                handler.flush()
            assert (tmp_path / "hslab.log").exists()
            assert "written" in (tmp_path / "hslab-errors.log").read_text()
        finally:
            _reset_root()
