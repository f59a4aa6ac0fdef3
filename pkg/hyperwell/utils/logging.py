# hyperwell/utils/logging.py
"""
structlog setup for the solver.

Events are dotted names (``spectrum.scan_complete``, ``oracle.short_box``)
with keyword fields. Console output goes through Rich on stderr so stdout
stays a clean payload stream; the optional rotating file gets one JSON
object per event.
"""

from __future__ import annotations

import enum
import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any

import structlog
from rich.console import Console
from rich.logging import RichHandler
from structlog.contextvars import bind_contextvars, clear_contextvars, merge_contextvars, unbind_contextvars
from structlog.typing import EventDict, Processor, WrappedLogger

VALID_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}

# Significant digits kept for float fields in log events
LOG_FLOAT_DIGITS = 10


def get_logger(name: str | None = None) -> structlog.stdlib.BoundLogger:
    """Logger for ``name``; extra fields via ``.bind(v0=..., parity=...)``."""
    return structlog.get_logger(name or "hyperwell")


def bind(**kw: Any) -> None:
    bind_contextvars(**kw)


def unbind(*keys: str) -> None:
    unbind_contextvars(*keys)


def clear_context() -> None:
    clear_contextvars()


def bind_run_context(command: str, run_id: str | None = None, **extra: Any) -> None:
    """Fields shared by every event of one CLI invocation (command, run_id, precision ...)."""
    context: dict[str, Any] = {"command": command}
    context.update({k: v for k, v in extra.items() if v is not None})
    if run_id:
        context["run_id"] = run_id
    bind_contextvars(**context)


def validate_log_level(level: str) -> bool:
    return level.upper() in VALID_LEVELS


# ---- processors -------------------------------------------------------------


def _plain_values(_: WrappedLogger, __: str, event_dict: EventDict) -> EventDict:
    """Enums by name, floats to LOG_FLOAT_DIGITS significant digits."""
    for key, value in event_dict.items():
        if isinstance(value, enum.Enum):
            event_dict[key] = value.name.lower()
        elif isinstance(value, float) and value == value and abs(value) != float("inf"):
            event_dict[key] = float(f"{value:.{LOG_FLOAT_DIGITS}g}")
    return event_dict


def _processors(renderer: Processor, with_callsite: bool) -> list[Processor]:
    chain: list[Processor] = [
        structlog.stdlib.filter_by_level,
        merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
    ]
    if with_callsite:
        chain.append(
            structlog.processors.CallsiteParameterAdder(
                parameters=[
                    structlog.processors.CallsiteParameter.MODULE,
                    structlog.processors.CallsiteParameter.FUNC_NAME,
                ]
            )
        )
    chain += [
        _plain_values,
        structlog.processors.TimeStamper(fmt="iso", utc=True),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        renderer,
    ]
    return chain


# ---- handlers ---------------------------------------------------------------


def _console_handler(rich_tracebacks: bool, show_path: bool) -> logging.Handler:
    return RichHandler(
        console=Console(stderr=True),
        show_time=False,
        rich_tracebacks=rich_tracebacks,
        show_path=show_path,
        markup=False,
    )


def _file_handler(path: Path, max_bytes: int, backups: int) -> logging.Handler:
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = RotatingFileHandler(str(path), maxBytes=max_bytes, backupCount=backups, encoding="utf-8")
    handler.setFormatter(logging.Formatter("%(message)s"))
    return handler


def setup_logging(
    *,
    level: str = "WARNING",
    file_enabled: bool = False,
    console_enabled: bool = True,
    json_file: bool = True,
    log_path: Path = Path("logs/hyperwell.log"),
    rotate_max_bytes: int = 10 * 1024 * 1024,
    rotate_backups: int = 5,
    rich_tracebacks: bool = True,
    show_path: bool = False,
) -> logging.Logger:
    """
    Configure stdlib handlers and the structlog processor chain.

    Call once per process: the CLI entry point and each scan worker.
    With a JSON file enabled every event is rendered as JSON (the console
    shows the same line); otherwise events use the key=value renderer.
    """
    handlers: list[logging.Handler] = []
    if console_enabled:
        handlers.append(_console_handler(rich_tracebacks, show_path))
    if file_enabled:
        handlers.append(_file_handler(Path(log_path), rotate_max_bytes, rotate_backups))
    if not handlers:
        handlers.append(logging.NullHandler())

    root = logging.getLogger()
    root.handlers.clear()
    logging.basicConfig(handlers=handlers, level=getattr(logging, level.upper(), logging.WARNING), format="%(message)s")

    use_json = json_file and file_enabled
    renderer: Processor = (
        structlog.processors.JSONRenderer(ensure_ascii=False, separators=(",", ":"), default=str)
        if use_json
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=_processors(renderer, with_callsite=use_json or show_path),
        wrapper_class=structlog.stdlib.BoundLogger,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )
    return logging.getLogger("hyperwell")
