"""
Tests for configuration management
"""

import json
from pathlib import Path
from unittest.mock import patch

import pytest

from hyperwell.config import (
    DEFAULT_CONFIG,
    ENV_CONFIG,
    ConfigManager,
    LoggingConfig,
    config_file,
    load_config,
    logging_config_from,
    oracle_config_from,
    scan_config_from,
)


class TestConfig:
    """Test configuration loading"""

    def test_config_file_follows_env(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        """HYPERWELL_CONFIG overrides the default location"""
        target = tmp_path / "custom.json"
        monkeypatch.setenv(ENV_CONFIG, str(target))
        assert config_file() == target

    def test_load_config_default(self) -> None:
        """Test loading default config when no file exists"""
        with patch("pathlib.Path.exists", return_value=False):
            config = load_config()
            assert config["scan"]["grid_points"] == 2000
            assert config["scan"]["n_schedule"][-1] == 60
            assert config["oracle"]["points"] == 4001
            assert config["output"]["format"] == "table"
            assert config["parallel_processing"] is False

    def test_load_config_from_file(self, tmp_path: Path) -> None:
        """Sections in the file overlay the defaults key by key"""
        path = tmp_path / "hyperwell.json"
        path.write_text(json.dumps({"scan": {"grid_points": 500}, "output": {"digits": 8}}))
        config = ConfigManager(path).load_config()
        assert config["scan"]["grid_points"] == 500
        assert config["scan"]["conv_tol"] == 1e-9
        assert config["output"]["digits"] == 8
        assert config["output"]["format"] == "table"

    def test_load_config_invalid_json(self) -> None:
        """Test loading config with invalid JSON falls back to defaults"""
        with (
            patch("pathlib.Path.exists", return_value=True),
            patch(
                "pathlib.Path.read_text",
                side_effect=json.JSONDecodeError("Invalid", "", 0),
            ),
        ):
            config = load_config()
            assert config == DEFAULT_CONFIG

    def test_load_config_invalid_values(self, tmp_path: Path) -> None:
        """An even oracle point count fails validation and the defaults are used"""
        path = tmp_path / "hyperwell.json"
        path.write_text(json.dumps({"oracle": {"points": 4000}}))
        with patch("hyperwell.config.log") as mock_log:
            config = ConfigManager(path).load_config()
        assert config["oracle"]["points"] == 4001
        assert mock_log.warning.call_args.args[0] == "config.load_failed"

    def test_unknown_keys_are_dropped(self, tmp_path: Path) -> None:
        path = tmp_path / "hyperwell.json"
        path.write_text(json.dumps({"library_path": "/tmp", "max_parallel_jobs": 2}))
        config = ConfigManager(path).load_config()
        assert "library_path" not in config
        assert config["max_parallel_jobs"] == 2

    def test_invalid_section_names_the_key(self, tmp_path: Path) -> None:
        """Validation failures are logged with the offending key, never written back"""
        path = tmp_path / "hyperwell.json"
        path.write_text(json.dumps({"max_parallel_jobs": 0}))
        with patch("hyperwell.config.log") as mock_log:
            config = ConfigManager(path).load_config()
        assert config["max_parallel_jobs"] == DEFAULT_CONFIG["max_parallel_jobs"]
        assert "max_parallel_jobs" in mock_log.warning.call_args.kwargs["error"]
        assert json.loads(path.read_text()) == {"max_parallel_jobs": 0}

    def test_manager_is_read_only(self) -> None:
        """Config files are edited by hand; nothing in the package writes them"""
        for name in ("save_config", "set", "reset_to_defaults"):
            assert not hasattr(ConfigManager, name)


class TestTypedSections:
    """Typed views of the config sections"""

    def test_scan_config(self) -> None:
        config = {"scan": {"n_schedule": [10, 20, 30], "grid_points": 300}}
        cfg = scan_config_from(config)
        assert cfg.n_schedule == (10, 20, 30)
        assert cfg.grid_points == 300
        assert cfg.precision_bits is None

    def test_precision_override(self) -> None:
        config = {"scan": {"precision_bits": 96}}
        assert scan_config_from(config).precision_bits == 96
        assert scan_config_from(config, precision_bits=192).precision_bits == 192

    def test_oracle_config(self) -> None:
        cfg = oracle_config_from({"oracle": {"half_width": 20.0, "points": 2001}})
        assert cfg.L == 20.0
        assert cfg.M == 2001
        assert cfg.k == 40

    def test_logging_config(self, tmp_path: Path) -> None:
        cfg = logging_config_from({"logging": {"level": "DEBUG", "path": str(tmp_path / "x.log"), "extra": 1}})
        assert isinstance(cfg, LoggingConfig)
        assert cfg.level == "DEBUG"
        assert cfg.path == tmp_path / "x.log"
        assert cfg.file_enabled is False
