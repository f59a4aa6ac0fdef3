"""
Scalar backends for the recurrence: binary-64 floats or mpmath software floats
"""

from __future__ import annotations

import math
import os
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any

import mpmath
import numpy as np

NATIVE_BITS = 53
ENV_PRECISION_BITS = "HYPERWELL_PRECISION_BITS"

# Cancellation in the Frobenius sums grows roughly like exp(|alpha|).
_LOG2_E = 1.0 / math.log(2.0)
_SAFE_CANCELLATION_BITS = 20


def default_precision_bits() -> int:
    """Precision selected by HYPERWELL_PRECISION_BITS, else binary-64."""
    raw = os.environ.get(ENV_PRECISION_BITS, "").strip()
    if not raw:
        return NATIVE_BITS
    try:
        bits = int(raw)
    except ValueError as e:
        raise ValueError(f"{ENV_PRECISION_BITS} must be an integer, got {raw!r}") from e
    if bits < NATIVE_BITS:
        raise ValueError(f"{ENV_PRECISION_BITS} must be >= {NATIVE_BITS}, got {bits}")
    return bits


def recommended_bits(alpha: float, floor: int = NATIVE_BITS) -> int:
    """Mantissa bits that keep ~40 significant bits after cancellation at |alpha|."""
    lost = abs(float(alpha)) * _LOG2_E
    if lost <= _SAFE_CANCELLATION_BITS and floor <= NATIVE_BITS:
        return NATIVE_BITS
    bits = 64 + 32 * math.ceil(lost / 32)
    return max(bits, floor)


@dataclass(frozen=True)
class PrecisionBackend:
    """Arithmetic used by the recurrence and the series sums.

    bits == 53 selects Python floats / float64 arrays; anything larger runs
    mpmath with that many mantissa bits (numpy object arrays for grids).
    """

    bits: int = NATIVE_BITS

    def __post_init__(self) -> None:
        if self.bits < NATIVE_BITS:
            raise ValueError(f"precision must be >= {NATIVE_BITS} bits, got {self.bits}")

    @classmethod
    def resolve(cls, bits: int | None = None) -> PrecisionBackend:
        return cls(bits if bits is not None else default_precision_bits())

    @property
    def is_native(self) -> bool:
        return self.bits == NATIVE_BITS

    @property
    def dps(self) -> int:
        return max(15, int(self.bits * math.log10(2.0)))

    @contextmanager
    def context(self) -> Iterator[None]:
        if self.is_native:
            yield
        else:
            with mpmath.workprec(self.bits):
                yield

    def scalar(self, x: Any) -> Any:
        if self.is_native:
            return float(x)
        return mpmath.mpf(x)

    def array(self, values: Any) -> np.ndarray:
        if self.is_native:
            return np.asarray(values, dtype=float)
        flat = [mpmath.mpf(v) for v in np.ravel(np.asarray(values, dtype=object))]
        return np.array(flat, dtype=object).reshape(np.shape(values))

    def is_finite(self, x: Any) -> bool:
        if self.is_native:
            return math.isfinite(x)
        return bool(mpmath.isfinite(x))

    def all_finite(self, arr: Any) -> bool:
        if self.is_native:
            return bool(np.all(np.isfinite(arr)))
        return all(mpmath.isfinite(v) for v in np.ravel(np.asarray(arr, dtype=object)))

    def log_abs(self, arr: Any) -> np.ndarray:
        """Natural log of |arr| as float64 (-inf at zeros)."""
        if self.is_native:
            with np.errstate(divide="ignore"):
                return np.log(np.abs(np.asarray(arr, dtype=float)))
        values = np.ravel(np.asarray(arr, dtype=object))
        out = np.array(
            [float(mpmath.log(abs(v))) if v != 0 else -math.inf for v in values],
            dtype=float,
        )
        return out.reshape(np.shape(arr))

    def describe(self) -> str:
        return "binary64" if self.is_native else f"mpmath-{self.bits}"


def signs_of(arr: Any) -> np.ndarray:
    """Integer sign array that works for float64 and mpmath object arrays."""
    a = np.asarray(arr)
    return (a > 0).astype(np.int8) - (a < 0).astype(np.int8)
