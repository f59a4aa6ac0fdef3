"""
Configuration management with validation and migration
"""

import copy
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .oracle import OracleConfig
from .spectrum import DEFAULT_SCHEDULE, ScanConfig
from .utils.logging import get_logger, validate_log_level
from .utils.validation import is_positive_number, is_schedule

log = get_logger(__name__)

# Config lives next to the launcher unless HYPERWELL_CONFIG points elsewhere
SCRIPT_DIR = Path(__file__).parent.parent
ENV_CONFIG = "HYPERWELL_CONFIG"
DEFAULT_LOG_DIR = SCRIPT_DIR / "logs"


def config_file() -> Path:
    override = os.environ.get(ENV_CONFIG, "").strip()
    return Path(override).expanduser() if override else SCRIPT_DIR / "hyperwell.json"


@dataclass
class LoggingConfig:
    """Configuration for structured logging with Rich console and JSON file output"""

    level: str = "WARNING"
    file_enabled: bool = False
    console_enabled: bool = True
    json_file: bool = True
    path: Path = DEFAULT_LOG_DIR / "hyperwell.log"
    rotate_max_bytes: int = 10 * 1024 * 1024  # 10 MiB
    rotate_backups: int = 5
    rich_tracebacks: bool = True
    show_path: bool = False

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "LoggingConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        if "path" in known:
            known["path"] = Path(known["path"])
        return cls(**known)


DEFAULT_CONFIG: dict[str, Any] = {
    "version": "1.0",
    "scan": {
        "n_schedule": list(DEFAULT_SCHEDULE),
        "grid_points": 2000,
        "root_tol": 1e-12,
        "conv_tol": 1e-9,
        "stable_steps": 3,
        "match_radius_cells": 10.0,
        "precision_bits": None,
        "auto_precision": True,
    },
    "oracle": {
        "half_width": 12.0,
        "points": 4001,
        "levels": 40,
    },
    "output": {
        "digits": 12,
        "format": "table",
    },
    "parallel_processing": False,
    "max_parallel_jobs": 4,
    "logging": {
        "level": "WARNING",
        "file_enabled": False,
        "console_enabled": True,
        "json_file": True,
        "path": str(DEFAULT_LOG_DIR / "hyperwell.log"),
        "rotate_max_bytes": 10 * 1024 * 1024,
        "rotate_backups": 5,
        "rich_tracebacks": True,
        "show_path": False,
    },
}

CONFIG_VALIDATORS = {
    "scan": lambda x: isinstance(x, dict)
    and is_schedule(x.get("n_schedule", list(DEFAULT_SCHEDULE)))
    and isinstance(x.get("grid_points", 2000), int)
    and x.get("grid_points", 2000) >= 2
    and is_positive_number(x.get("root_tol", 1e-12))
    and is_positive_number(x.get("conv_tol", 1e-9))
    and isinstance(x.get("stable_steps", 3), int)
    and x.get("stable_steps", 3) >= 1
    and is_positive_number(x.get("match_radius_cells", 10.0))
    and (x.get("precision_bits") is None or (isinstance(x["precision_bits"], int) and x["precision_bits"] >= 53))
    and isinstance(x.get("auto_precision", True), bool),
    "oracle": lambda x: isinstance(x, dict)
    and is_positive_number(x.get("half_width", 12.0))
    and isinstance(x.get("points", 4001), int)
    and x.get("points", 4001) >= 3
    and x.get("points", 4001) % 2 == 1
    and isinstance(x.get("levels", 40), int)
    and x.get("levels", 40) >= 1,
    "output": lambda x: isinstance(x, dict)
    and isinstance(x.get("digits", 12), int)
    and 1 <= x.get("digits", 12) <= 40
    and x.get("format", "table") in ("table", "csv", "json"),
    "parallel_processing": lambda x: isinstance(x, bool),
    "max_parallel_jobs": lambda x: isinstance(x, int) and 1 <= x <= 64,
    "logging": lambda x: isinstance(x, dict) and validate_log_level(str(x.get("level", "WARNING"))),
}


class ConfigManager:
    """Configuration manager with validation and migration"""

    def __init__(self, path: Path | None = None) -> None:
        self.path = path
        self.config: dict[str, Any] = {}

    @property
    def file(self) -> Path:
        return self.path or config_file()

    def load_config(self) -> dict[str, Any]:
        """Load configuration with validation and migration"""
        if self.file.exists():
            try:
                loaded_config = json.loads(self.file.read_text())
                self.config = self._migrate_config(loaded_config)
                self._validate_config()
                return self.config
            except Exception as e:
                log.warning("config.load_failed", path=str(self.file), error=str(e))

        self.config = copy.deepcopy(DEFAULT_CONFIG)
        return self.config

    def _migrate_config(self, loaded_config: dict[str, Any]) -> dict[str, Any]:
        """Overlay a loaded file onto the defaults, section by section"""
        if not isinstance(loaded_config, dict):
            raise ValueError("configuration file must hold a JSON object")
        migrated = copy.deepcopy(DEFAULT_CONFIG)

        for key, value in loaded_config.items():
            if key not in migrated:
                log.info("config.unknown_key", key=key)
                continue
            if isinstance(migrated[key], dict) and isinstance(value, dict):
                migrated[key].update(value)
            else:
                migrated[key] = value

        migrated["version"] = DEFAULT_CONFIG["version"]
        return migrated

    def _validate_config(self) -> None:
        """Validate configuration data against schema"""
        errors = []

        for key, validator in CONFIG_VALIDATORS.items():
            if key in self.config:
                try:
                    if not validator(self.config[key]):
                        errors.append(f"Invalid value for '{key}': {self.config[key]}")
                except Exception as e:
                    errors.append(f"Validation error for '{key}': {e}")

        if errors:
            error_msg = "Configuration validation errors:\n" + "\n".join(f"  • {e}" for e in errors)
            raise ValueError(error_msg)


def scan_config_from(config: dict[str, Any], precision_bits: int | None = None) -> ScanConfig:
    """Typed scan settings; an explicit precision_bits wins over the file."""
    scan = {**DEFAULT_CONFIG["scan"], **config.get("scan", {})}
    bits = precision_bits if precision_bits is not None else scan["precision_bits"]
    return ScanConfig(
        n_schedule=tuple(scan["n_schedule"]),
        grid_points=int(scan["grid_points"]),
        root_tol=float(scan["root_tol"]),
        conv_tol=float(scan["conv_tol"]),
        stable_steps=int(scan["stable_steps"]),
        match_radius_cells=float(scan["match_radius_cells"]),
        precision_bits=bits,
        auto_precision=bool(scan["auto_precision"]),
    )


def oracle_config_from(config: dict[str, Any]) -> OracleConfig:
    oracle = {**DEFAULT_CONFIG["oracle"], **config.get("oracle", {})}
    return OracleConfig(L=float(oracle["half_width"]), M=int(oracle["points"]), k=int(oracle["levels"]))


def logging_config_from(config: dict[str, Any]) -> LoggingConfig:
    return LoggingConfig.from_dict({**DEFAULT_CONFIG["logging"], **config.get("logging", {})})


# Global config manager instance
config_manager = ConfigManager()


def load_config() -> dict[str, Any]:
    return config_manager.load_config()
