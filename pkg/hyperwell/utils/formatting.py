"""Number formatting and table helpers"""

import math
from typing import Any

from rich import box
from rich.table import Table


class TextFormatter:
    """Utilities for formatting numbers for display and export"""

    @staticmethod
    def format_sig(value: Any, digits: int = 12) -> str:
        """Significant-digit formatting; integers and strings pass through"""
        if value is None:
            return ""
        if isinstance(value, bool) or isinstance(value, int):
            return str(value)
        if isinstance(value, float):
            if math.isnan(value):
                return "nan"
            if math.isinf(value):
                return "inf" if value > 0 else "-inf"
            return f"{value:.{digits}g}"
        return str(value)

    @staticmethod
    def round_sig(value: float, digits: int = 12) -> float:
        """Round to `digits` significant digits (stable JSON output)"""
        if value == 0 or not math.isfinite(value):
            return value
        return float(f"{value:.{digits}g}")

    @staticmethod
    def format_duration(seconds: float) -> str:
        """Wall time of a run: 1.250s, 2m 5.0s, 1h 2m"""
        if seconds < 60:
            return f"{seconds:.3f}s"
        minutes, secs = divmod(seconds, 60)
        if minutes < 60:
            return f"{int(minutes)}m {secs:.1f}s"
        hours, minutes = divmod(int(minutes), 60)
        return f"{hours}h {minutes}m"


class DisplayFormatter:
    """Rich-based display formatting utilities"""

    @staticmethod
    def create_results_table(rows: list[dict[str, Any]], title: str = "", digits: int = 12) -> Table:
        """Create a formatted table from result rows"""
        if not rows:
            table = Table(title=title or "No Data", box=box.ROUNDED)
            table.add_column("Message", style="dim")
            table.add_row("0 states")
            return table

        table = Table(title=title, box=box.ROUNDED)
        headers = list(rows[0].keys())
        for header in headers:
            numeric = isinstance(rows[0][header], (int, float)) and not isinstance(rows[0][header], bool)
            table.add_column(header, style="cyan" if not numeric else None, justify="right" if numeric else "left")

        for row in rows:
            table.add_row(*[TextFormatter.format_sig(row.get(h), digits) for h in headers])

        return table


display_formatter = DisplayFormatter()
