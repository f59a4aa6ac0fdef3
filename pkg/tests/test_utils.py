"""
Tests for argument validation, logging setup, timing and progress helpers
"""

import argparse
import json
import logging
from pathlib import Path
from unittest.mock import Mock, patch

import pytest
import structlog

from hyperwell.ui.progress import ProgressManager
from hyperwell.utils.logging import bind_run_context, clear_context, setup_logging, validate_log_level
from hyperwell.utils.timing import log_step
from hyperwell.utils.validation import ArgValidator, is_positive_number, is_schedule


class TestArgValidator:
    """argparse type callables"""

    @pytest.mark.parametrize(
        "func, text, expected",
        [
            (ArgValidator.positive_float, "57.8444102", 57.8444102),
            (ArgValidator.positive_int, "3", 3),
            (ArgValidator.non_negative_int, "0", 0),
            (ArgValidator.odd_int, "4001", 4001),
            (ArgValidator.precision_bits, "128", 128),
            (ArgValidator.digits, "12", 12),
            (ArgValidator.log_level, "debug", "DEBUG"),
        ],
    )
    def test_accepts(self, func, text: str, expected: object) -> None:
        assert func(text) == expected

    @pytest.mark.parametrize(
        "func, text",
        [
            (ArgValidator.positive_float, "-1"),
            (ArgValidator.positive_float, "0"),
            (ArgValidator.positive_float, "nan"),
            (ArgValidator.positive_float, "abc"),
            (ArgValidator.positive_int, "0"),
            (ArgValidator.non_negative_int, "-1"),
            (ArgValidator.non_negative_int, "1.5"),
            (ArgValidator.odd_int, "4000"),
            (ArgValidator.precision_bits, "32"),
            (ArgValidator.digits, "41"),
            (ArgValidator.log_level, "chatty"),
        ],
    )
    def test_rejects(self, func, text: str) -> None:
        with pytest.raises(argparse.ArgumentTypeError):
            func(text)

    def test_output_path(self, tmp_path: Path) -> None:
        assert ArgValidator.output_path(str(tmp_path / "fig.svg")) == tmp_path / "fig.svg"
        with pytest.raises(argparse.ArgumentTypeError, match="parent"):
            ArgValidator.output_path(str(tmp_path / "missing" / "fig.svg"))
        with pytest.raises(argparse.ArgumentTypeError, match="empty"):
            ArgValidator.output_path("  ")

    def test_config_predicates(self) -> None:
        assert is_schedule([10, 15, 20])
        assert not is_schedule([10, 10])
        assert not is_schedule([])
        assert not is_schedule([True, 2])
        assert is_positive_number(1e-9)
        assert not is_positive_number(True)
        assert not is_positive_number(float("inf"))


class TestLogStep:
    """Start/complete events around a call"""

    def test_emits_start_and_complete(self) -> None:
        fake = Mock()
        with patch("hyperwell.utils.timing.get_logger", return_value=fake):

            @log_step("oracle.solve")
            def work(x: int) -> int:
                return 2 * x

            assert work(21) == 42
        events = [c.args[0] for c in fake.debug.call_args_list]
        assert events == ["oracle.solve_start", "oracle.solve_complete"]
        assert "took_ms" in fake.debug.call_args_list[1].kwargs

    def test_marks_failures(self) -> None:
        fake = Mock()
        with patch("hyperwell.utils.timing.get_logger", return_value=fake):

            @log_step("spectrum.scan", level="info")
            def broken() -> None:
                raise ValueError("boom")

            with pytest.raises(ValueError, match="boom"):
                broken()
        assert fake.info.call_args_list[-1].kwargs["failed"] is True


class TestLogging:
    """structlog configuration"""

    def test_validate_log_level(self) -> None:
        assert validate_log_level("warning")
        assert not validate_log_level("loud")

    def test_json_file_output(self, tmp_path: Path) -> None:
        """File events are single-line JSON with the bound run context"""
        log_path = tmp_path / "logs" / "run.log"
        try:
            setup_logging(level="INFO", file_enabled=True, console_enabled=False, log_path=log_path)
            bind_run_context("spectrum", run_id="abc123", v0=57.8444102)
            structlog.get_logger("hyperwell.test").info("spectrum.scanned", converged=4)
            for handler in logging.getLogger().handlers:
                handler.flush()
            line = log_path.read_text().strip().splitlines()[-1]
            event = json.loads(line)
            assert event["event"] == "spectrum.scanned"
            assert event["run_id"] == "abc123"
            assert event["command"] == "spectrum"
            assert event["converged"] == 4
        finally:
            clear_context()
            setup_logging(level="WARNING", console_enabled=False)


class TestProgress:
    """Rich progress wrappers"""

    def test_disabled_bar_still_tracks(self) -> None:
        manager = ProgressManager(enabled=False)
        seen = []
        for v0 in manager.track([10.0, 20.0, 30.0], "v0 scan", label=lambda v: f"v0={v:g}"):
            seen.append(v0)
            assert manager.last is not None
            assert manager.last.tasks[0].description == f"v0 scan: v0={v0:g}"
        assert seen == [10.0, 20.0, 30.0]
        assert manager.last.tasks[0].completed == 3
        assert manager.last.tasks[0].description == "v0 scan"

    def test_empty_sweep(self) -> None:
        manager = ProgressManager(enabled=False)
        assert list(manager.track([], "v0 scan")) == []
