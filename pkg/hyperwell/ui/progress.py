"""Progress display for v0 sweeps, on stderr"""

from __future__ import annotations

from collections.abc import Callable, Iterator, Sequence
from typing import TypeVar

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

T = TypeVar("T")

console = Console(stderr=True)


class ProgressManager:
    """Sweep progress; drawn only when stderr is a terminal unless told otherwise"""

    def __init__(self, enabled: bool | None = None) -> None:
        self.enabled = console.is_terminal if enabled is None else enabled
        self.last: Progress | None = None

    def _progress(self) -> Progress:
        return Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=console,
            transient=True,
            disable=not self.enabled,
        )

    def track(self, items: Sequence[T], title: str, label: Callable[[T], str] | None = None) -> Iterator[T]:
        """Yield items while advancing one bar; label(item) replaces the title while it runs."""
        progress = self._progress()
        self.last = progress
        with progress:
            task = progress.add_task(title, total=len(items))
            for item in items:
                if label is not None:
                    progress.update(task, description=f"{title}: {label(item)}")
                yield item
                progress.advance(task)
            progress.update(task, description=title)


progress_manager = ProgressManager()
