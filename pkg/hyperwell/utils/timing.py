# hyperwell/utils/timing.py
"""
Timing decorator for solver start/complete events
"""

import time
from collections.abc import Callable
from functools import wraps
from typing import Any

from .logging import get_logger


def log_step(event_base: str, level: str = "debug") -> Callable:
    """
    Decorator to emit start/complete events with timing around a solver call.

    @log_step("spectrum.eigenvalues") emits:
      - event: "spectrum.eigenvalues_start"
      - event: "spectrum.eigenvalues_complete" with took_ms (and failed=True
        when the call raised)

    Args:
        event_base: Base event name (e.g., "oracle.solve")
        level: structlog method used for both events
    """

    def decorator(fn: Callable) -> Callable:
        @wraps(fn)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            log = get_logger(fn.__module__)
            emit = getattr(log, level)
            emit(f"{event_base}_start")
            t0 = time.perf_counter()
            failed = False
            try:
                return fn(*args, **kwargs)
            except Exception:
                failed = True
                raise
            finally:
                dt = (time.perf_counter() - t0) * 1000
                if failed:
                    emit(f"{event_base}_complete", took_ms=round(dt, 3), failed=True)
                else:
                    emit(f"{event_base}_complete", took_ms=round(dt, 3))

        return wrapper

    return decorator
