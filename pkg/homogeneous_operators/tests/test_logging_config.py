"""
Tests for logging setup and formatters.

Run with: pytest homogeneous_operators/tests/test_logging_config.py -v
"""

import json
import logging
import sys

import pytest

from homogeneous_operators.logging_config import (
    ColoredFormatter,
    JSONFormatter,
    log_check_complete,
    setup_logging,
)


def make_record(message="hello %s", args=("world",), level=logging.INFO):
    return logging.LogRecord("homogeneous_operators.test", level, __file__, 10, message, args, None)


class TestFormatters:
    """Console formatters."""

    def test_json_fields(self):
        record = make_record()
        record.check_id = "god"
        record.residual = None
        data = json.loads(JSONFormatter().format(record))
        assert data["message"] == "hello world"
        assert data["level"] == "INFO"
        assert data["logger"] == "homogeneous_operators.test"
        assert data["check_id"] == "god"
        assert data["residual"] is None
        assert "args" not in data and "msg" not in data

    def test_json_exception(self):
        try:
            raise RuntimeError("boom")
        except RuntimeError:
            record = logging.LogRecord("x", logging.ERROR, __file__, 1, "failed", (), sys.exc_info())
        data = json.loads(JSONFormatter().format(record))
        assert "RuntimeError: boom" in data["exception"]

    def test_colored_formatter_leaves_record_alone(self):
        record = make_record(level=logging.WARNING)
        text = ColoredFormatter(fmt="%(levelname)s %(message)s").format(record)
        assert "\033[33m" in text and "hello world" in text
        assert record.levelname == "WARNING"


@pytest.mark.usefixtures("restore_logging")
class TestSetup:
    """Root logger configuration."""

    def test_level_and_json_console(self):
        setup_logging(level="DEBUG", enable_colors=False, json_lines=True)
        root = logging.getLogger()
        assert root.level == logging.DEBUG
        assert len(root.handlers) == 1
        assert isinstance(root.handlers[0].formatter, JSONFormatter)

    def test_console_writes_to_stderr(self, capsys):
        setup_logging(level="INFO", enable_colors=False)
        logging.getLogger("homogeneous_operators.test").info("to stderr")
        captured = capsys.readouterr()
        assert "to stderr" in captured.err
        assert captured.out == ""

    def test_log_file(self, tmp_path):
        path = tmp_path / "run.log"
        setup_logging(level="INFO", log_file=str(path), enable_colors=False)
        logger = logging.getLogger("homogeneous_operators.test")
        log_check_complete(logger, "god", "pass", None, 12.5)
        for handler in logging.getLogger().handlers:
            handler.flush()
        text = path.read_text()
        assert "Check 'god' finished: pass (residual exact, 12.5 ms)" in text

    def test_unknown_level_defaults_to_info(self):
        setup_logging(level="chatty", enable_colors=False)
        assert logging.getLogger().level == logging.INFO
