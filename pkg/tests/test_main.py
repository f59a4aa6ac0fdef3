"""
Tests for the hyperwell launcher, run as a separate process
"""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

SCRIPT = Path(__file__).parent.parent / "hyperwell.py"


def _run(*argv: str, config: Path | None = None) -> subprocess.CompletedProcess[str]:
    env = dict(os.environ)
    env.pop("HYPERWELL_PRECISION_BITS", None)
    if config is not None:
        env["HYPERWELL_CONFIG"] = str(config)
    return subprocess.run(
        [sys.executable, str(SCRIPT), *argv],
        capture_output=True,
        text=True,
        env=env,
        timeout=600,
    )


@pytest.fixture
def config_path(tmp_path: Path) -> Path:
    return tmp_path / "hyperwell.json"


class TestArgumentParsing:
    """Argument handling via subprocess calls"""

    def test_help_output(self, config_path: Path) -> None:
        result = _run("--help", config=config_path)
        assert result.returncode == 0
        assert "usage:" in result.stdout
        for name in ("spectrum", "exact", "critical", "scan", "oracle", "check", "wavefunction"):
            assert name in result.stdout

    def test_version_output(self, config_path: Path) -> None:
        result = _run("--version", config=config_path)
        assert result.returncode == 0
        assert result.stdout.startswith("hyperwell ")

    @pytest.mark.parametrize(
        "argv",
        [
            (),
            ("spectrum",),
            ("spectrum", "--v0", "-1"),
            ("exact", "--n", "-1"),
            ("oracle", "--v0", "4", "--M", "4000"),
            ("spectrum", "--v0", "10", "--json", "--csv"),
        ],
    )
    def test_invalid_args_exit_2(self, argv: tuple[str, ...], config_path: Path) -> None:
        result = _run(*argv, config=config_path)
        assert result.returncode == 2
        assert result.stdout == ""


class TestOutputs:
    """Machine-readable stdout"""

    def test_exact_json_is_reproducible(self, config_path: Path) -> None:
        first = _run("exact", "--n", "0", "--json", config=config_path)
        second = _run("exact", "--n", "0", "--json", config=config_path)
        assert first.returncode == 0
        assert first.stdout == second.stdout
        doc = json.loads(first.stdout)
        assert doc["command"].startswith("exact")
        accepted = [r for r in doc["results"] if r["accepted"]]
        assert {r["parity"] for r in accepted} == {"even", "odd"}

    def test_logs_stay_off_stdout(self, config_path: Path) -> None:
        result = _run("exact", "--n", "0", "--csv", "--log-level", "DEBUG", config=config_path)
        assert result.returncode == 0
        assert result.stdout.splitlines()[0] == "n,i,parity,alpha,v0,beta,epsilon,accepted"

    @pytest.mark.integration
    def test_oracle_single_level(self, config_path: Path) -> None:
        result = _run("oracle", "--v0", "4", "--k", "3", "--json", config=config_path)
        assert result.returncode == 0
        assert len(json.loads(result.stdout)["results"]) == 1


@pytest.mark.slow
class TestAudit:
    """check exits 0 only when every audit passes"""

    def test_check_polynomial_point(self, config_path: Path) -> None:
        result = _run("check", "--v0", "57.8444102", "--csv", config=config_path)
        assert result.returncode == 0, result.stderr
        assert result.stdout.splitlines()[0] == "check,ok,detail"
        assert ",False," not in result.stdout
