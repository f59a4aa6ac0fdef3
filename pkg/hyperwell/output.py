"""
Result payloads for the command line: JSON, CSV and optional SVG figures

Output is byte-stable for fixed inputs: keys are sorted, floats are rounded to
the requested significant digits and nothing time dependent is written.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from .utils.formatting import TextFormatter
from .utils.logging import get_logger

log = get_logger(__name__)

SCHEMA_VERSION = "1.0"


def _rounded(value: Any, digits: int) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        return TextFormatter.round_sig(value, digits)
    if isinstance(value, dict):
        return {k: _rounded(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v, digits) for v in value]
    return value


@dataclass
class OutputRecord:
    """One run: command echo, config echo, result rows and diagnostics."""

    command: str
    columns: tuple[str, ...]
    config: dict[str, Any] = field(default_factory=dict)
    results: list[dict[str, Any]] = field(default_factory=list)
    diagnostics: dict[str, Any] = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    def add(self, **row: Any) -> None:
        missing = [c for c in self.columns if c not in row]
        if missing:
            raise ValueError(f"row is missing columns {missing}")
        self.results.append({c: row[c] for c in self.columns})

    def warn(self, message: str) -> None:
        self.diagnostics.setdefault("warnings", []).append(message)

    def to_json(self, digits: int = 12) -> str:
        payload = {
            "schema_version": self.schema_version,
            "command": self.command,
            "config": _rounded(self.config, digits),
            "columns": list(self.columns),
            "results": _rounded(self.results, digits),
            "diagnostics": _rounded(self.diagnostics, digits),
        }
        return json.dumps(payload, sort_keys=True, indent=2, allow_nan=True) + "\n"

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.results, columns=list(self.columns))

    def to_csv(self, digits: int = 12) -> str:
        buf = io.StringIO()
        self.to_frame().to_csv(buf, index=False, lineterminator="\n", float_format=f"%.{digits}g")
        return buf.getvalue()


def write_svg(
    path: Path,
    series: dict[str, tuple[list[float], list[float]]],
    xlabel: str,
    ylabel: str,
    scatter: frozenset[str] = frozenset(),
) -> Path:
    """Minimal line/scatter figure; needs the `plot` extra (matplotlib)."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as e:
        raise RuntimeError("SVG output needs matplotlib (pip install 'hyperwell[plot]')") from e

    plt.rcParams["svg.hashsalt"] = "hyperwell"
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for label, (xs, ys) in series.items():
        if label in scatter:
            ax.scatter(xs, ys, s=14, marker="o", facecolors="none", edgecolors="tab:red", label=label)
        else:
            ax.plot(xs, ys, marker="s", markersize=3, linewidth=1.0, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if series:
        ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    log.info("output.svg_written", path=str(path), series=len(series))
    return path
