"""
Display utilities using Rich: result tables on stdout, notes on stderr
"""

import shutil
from typing import Any

from rich.console import Console
from rich.table import Table

from .utils.formatting import TextFormatter, display_formatter

# Payload console (stdout) and chatter console (stderr)
console = Console()
err_console = Console(stderr=True)


class Sty:
    """Colour switch shared by both consoles"""

    enabled = True

    @classmethod
    def off(cls) -> None:
        cls.enabled = False
        console.no_color = True
        err_console.no_color = True


def term_width(default: int = 100) -> int:
    try:
        return int(shutil.get_terminal_size().columns)
    except Exception:
        return default


def results_table(rows: list[dict[str, Any]], title: str = "", digits: int = 12) -> None:
    console.print(display_formatter.create_results_table(rows, title=title, digits=digits))


def note(message: str, style: str = "dim") -> None:
    err_console.print(f"[{style}]{message}[/{style}]")


def warn(message: str) -> None:
    err_console.print(f"[yellow]⚠️  {message}[/yellow]")


def section(title: str) -> None:
    err_console.print(f"\n[magenta]{title}[/magenta]")
    err_console.print("─" * min(term_width(), 80))


def audit_table(checks: list[tuple[str, bool, str]]) -> None:
    """Pass/fail lines of the `check` command"""
    table = Table(show_header=False, box=None)
    table.add_column("Check", style="cyan")
    table.add_column("Result")
    table.add_column("Detail", style="bright_black")
    for name, ok, detail in checks:
        table.add_row(name, "[green]pass[/green]" if ok else "[red]FAIL[/red]", detail)
    console.print(table)


def summary_table(stats: dict[str, Any], elapsed: float) -> None:
    """Counts of a run, on stderr"""
    table = Table(show_header=False, box=None)
    table.add_column("Metric", style="cyan")
    table.add_column("Count", justify="right")
    for key, value in stats.items():
        style = "red" if key in ("unconverged", "failed", "missing") and value else None
        table.add_row(key, str(value), style=style)
    err_console.print(table)
    err_console.print(f"[cyan]elapsed[/cyan]: {TextFormatter.format_duration(elapsed)}")
