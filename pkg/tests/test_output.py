"""
Tests for JSON, CSV and SVG result payloads
"""

import json
from pathlib import Path

import numpy as np
import pytest

from hyperwell.output import SCHEMA_VERSION, OutputRecord, write_svg


def _record() -> OutputRecord:
    record = OutputRecord(
        command="spectrum --v0 57.8444102",
        columns=("nu", "parity", "epsilon"),
        config={"v0": 57.8444102, "conv_tol": 1e-9},
    )
    record.add(nu=0, parity="even", epsilon=-5.302775637731995)
    record.add(nu=1, parity="odd", epsilon=-3.1234567890123456)
    return record


@pytest.mark.unit
class TestOutputRecord:
    """Row handling and serialization"""

    def test_add_requires_all_columns(self) -> None:
        record = OutputRecord(command="x", columns=("a", "b"))
        with pytest.raises(ValueError, match="missing columns"):
            record.add(a=1)

    def test_add_orders_and_drops_extra_keys(self) -> None:
        record = OutputRecord(command="x", columns=("a", "b"))
        record.add(b=2, a=1, c=3)
        assert record.results == [{"a": 1, "b": 2}]

    def test_json_payload(self) -> None:
        doc = json.loads(_record().to_json(digits=6))
        assert doc["schema_version"] == SCHEMA_VERSION
        assert doc["columns"] == ["nu", "parity", "epsilon"]
        assert doc["results"][0]["epsilon"] == -5.30278
        assert doc["config"]["v0"] == 57.8444

    def test_json_is_deterministic(self) -> None:
        first = _record().to_json()
        second = _record().to_json()
        assert first == second
        assert first.endswith("}\n")
        assert first.index('"columns"') < first.index('"results"')

    def test_numpy_scalars_serialize(self) -> None:
        record = OutputRecord(command="oracle --v0 4.3 --L 6", columns=("index", "nodes", "epsilon", "contaminated"))
        record.add(index=0, nodes=np.int64(0), epsilon=np.float64(-0.012345678), contaminated=np.bool_(True))
        doc = json.loads(record.to_json(digits=4))
        row = doc["results"][0]
        assert row["contaminated"] is True
        assert row["nodes"] == 0
        assert row["epsilon"] == -0.01235

    def test_warnings_collect_in_diagnostics(self) -> None:
        record = _record()
        record.warn("chain near beta_max")
        record.warn("oracle box short")
        doc = json.loads(record.to_json())
        assert doc["diagnostics"]["warnings"] == ["chain near beta_max", "oracle box short"]

    def test_csv(self) -> None:
        text = _record().to_csv(digits=6)
        lines = text.split("\n")
        assert lines[0] == "nu,parity,epsilon"
        assert lines[1] == "0,even,-5.30278"
        assert lines[2] == "1,odd,-3.12346"
        assert "\r" not in text

    def test_empty_csv_has_header(self) -> None:
        record = OutputRecord(command="spectrum --v0 4 --parity odd", columns=("nu", "epsilon"))
        assert record.to_csv() == "nu,epsilon\n"
        assert record.to_frame().empty


@pytest.mark.unit
class TestSvg:
    """Optional matplotlib figures"""

    def test_writes_reproducible_svg(self, tmp_path: Path) -> None:
        pytest.importorskip("matplotlib")
        series = {"nu=0": ([400.0, 900.0], [-50.1, -120.3]), "exact": ([57.8], [-5.3])}
        first = write_svg(tmp_path / "a.svg", series, "v0", "epsilon", scatter=frozenset({"exact"}))
        second = write_svg(tmp_path / "b.svg", series, "v0", "epsilon", scatter=frozenset({"exact"}))
        text = first.read_text()
        assert "<svg" in text
        assert text == second.read_text()

    def test_missing_matplotlib(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        import builtins

        real_import = builtins.__import__

        def fake_import(name: str, *args, **kwargs):
            if name.startswith("matplotlib"):
                raise ImportError(name)
            return real_import(name, *args, **kwargs)

        monkeypatch.setattr(builtins, "__import__", fake_import)
        with pytest.raises(RuntimeError, match="matplotlib"):
            write_svg(tmp_path / "x.svg", {}, "v0", "epsilon")
