"""
Three-term recurrence for the Frobenius coefficients of the transformed equation

    c_{j+2} = A_j c_{j+1} + B_j c_j,   j = -1, 0, 1, ...,   c_{-1} = 0, c_0 = 1

Index convention: the step at j produces c_{j+2}, so the first step (j = -1)
produces c_1 = A_{-1}.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import mpmath
import numpy as np

from .model import ModelContext, Parity
from .precision import PrecisionBackend, signs_of

RESCALE_BASE = 2.0**500


def _check_index(j: int) -> int:
    if int(j) != j or j < -1:
        raise ValueError(f"recurrence index j must be an integer >= -1, got {j}")
    return int(j)


def _check_beta(beta: Any) -> None:
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")


def _a_term(gamma: int, alpha: Any, beta: Any, j: int) -> Any:
    s = beta + (gamma + 2 * j + 2)
    denom = 4 * (beta + (j + 2)) * (j + 2)
    return (s * (s + 1) - alpha * alpha - 2 * alpha * (beta + (2 * j + 3))) / denom


def _b_term(gamma: int, alpha: Any, beta: Any, j: int) -> Any:
    denom = 4 * (beta + (j + 2)) * (j + 2)
    return alpha * (alpha + 2 * beta + (2 * gamma + 4 * j + 3)) / denom


def coeff_A(ctx: ModelContext, beta: float, j: int) -> float:
    """A_j(gamma, alpha, beta) of the general-parity recurrence."""
    j = _check_index(j)
    _check_beta(beta)
    return _a_term(int(ctx.gamma), ctx.alpha, beta, j)


def coeff_B(ctx: ModelContext, beta: float, j: int) -> float:
    """B_j(gamma, alpha, beta) = alpha (alpha + 2 beta + 2 gamma + 4 j + 3) / D_j."""
    j = _check_index(j)
    _check_beta(beta)
    return _b_term(int(ctx.gamma), ctx.alpha, beta, j)


def coeff_A_even(alpha: float, beta: float, j: int) -> float:
    """Even-sector form -((beta + 2j + 3)(2 alpha - beta - 2(j + 1)) + alpha^2) / D_j."""
    j = _check_index(j)
    _check_beta(beta)
    denom = 4 * (beta + j + 2) * (j + 2)
    return -((beta + 2 * j + 3) * (2 * alpha - beta - 2 * (j + 1)) + alpha * alpha) / denom


def coeff_B_even(alpha: float, beta: float, j: int) -> float:
    j = _check_index(j)
    _check_beta(beta)
    denom = 4 * (beta + j + 2) * (j + 2)
    return alpha * (alpha + 2 * beta + 4 * j + 3) / denom


@dataclass(frozen=True)
class ScaledCoefficientSequence:
    """
    c_0..c_N as (mantissa, exponent) pairs with c_j = mantissa * rescale_base**exponent.

    Mantissas never exceed rescale_base in magnitude; signs and zeros are those
    of the unscaled recurrence.
    """

    entries: tuple[tuple[Any, int], ...]
    rescale_base: float = RESCALE_BASE

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def order(self) -> int:
        return len(self.entries) - 1

    def sign(self, j: int) -> int:
        m = self.entries[j][0]
        return (m > 0) - (m < 0)

    def log_magnitude(self, j: int) -> float:
        m, e = self.entries[j]
        if m == 0:
            return -math.inf
        return float(mpmath.log(abs(m))) + e * math.log(self.rescale_base)

    def values(self) -> list[Any]:
        """Coefficients sharing the scale of the last entry (float or mpf)."""
        e_ref = self.entries[-1][1]
        log_base = math.log(self.rescale_base)
        out: list[Any] = []
        for m, e in self.entries:
            shift = e - e_ref
            if shift == 0 or m == 0:
                out.append(m)
            elif isinstance(m, float):
                arg = math.log(abs(m)) + shift * log_base
                out.append(math.copysign(math.exp(arg) if arg < 709.0 else math.inf, m))
            else:
                out.append(m * mpmath.mpf(self.rescale_base) ** shift)
        return out

    def normalized(self) -> list[Any]:
        """Coefficients divided by the largest-magnitude one, so every |value| <= 1."""
        k = max(range(len(self.entries)), key=self.log_magnitude)
        m_ref, e_ref = self.entries[k]
        log_base = math.log(self.rescale_base)
        out: list[Any] = []
        for m, e in self.entries:
            shift = e - e_ref
            if m == 0:
                out.append(m)
            elif isinstance(m, float):
                if shift == 0:
                    out.append(m / m_ref)
                else:
                    arg = math.log(abs(m / m_ref)) + shift * log_base
                    out.append(math.copysign(math.exp(min(arg, 0.0)), m / m_ref))
            else:
                out.append(m / m_ref * mpmath.mpf(self.rescale_base) ** shift)
        return out

    def as_mpf(self) -> list[mpmath.mpf]:
        """Exact represented values as mpf (mpmath exponents do not overflow)."""
        base = mpmath.mpf(self.rescale_base)
        return [mpmath.mpf(m) * base**e for m, e in self.entries]


def _rescale_pair(prev: Any, cur: Any, exponent: int, base: Any) -> tuple[Any, Any, int]:
    big = max(abs(prev), abs(cur))
    if big > base:
        return prev / base, cur / base, exponent + 1
    if 0 < big < 1 / base:
        return prev * base, cur * base, exponent - 1
    return prev, cur, exponent


def coefficient_sequence(
    ctx: ModelContext,
    beta: float,
    N: int,
    backend: PrecisionBackend | None = None,
    rescale_base: float = RESCALE_BASE,
) -> ScaledCoefficientSequence:
    """Run the recurrence to c_N with running-pair rescaling."""
    if int(N) != N or N < 1:
        raise ValueError(f"truncation order N must be an integer >= 1, got {N}")
    _check_beta(beta)
    if not rescale_base > 1:
        raise ValueError(f"rescale_base must exceed 1, got {rescale_base}")
    backend = backend or PrecisionBackend.resolve()
    gamma = int(ctx.gamma)

    with backend.context():
        alpha = backend.scalar(ctx.alpha)
        b = backend.scalar(beta)
        base = backend.scalar(rescale_base)
        prev, cur, exponent = backend.scalar(0), backend.scalar(1), 0
        entries: list[tuple[Any, int]] = [(cur, 0)]
        for j in range(-1, N - 1):
            nxt = _a_term(gamma, alpha, b, j) * cur + _b_term(gamma, alpha, b, j) * prev
            if not backend.is_finite(nxt):
                raise ValueError(
                    f"non-finite recurrence value at c_{j + 2} "
                    f"(gamma={gamma}, alpha={ctx.alpha}, beta={beta})"
                )
            prev, cur = cur, nxt
            # stored entries keep their own exponent; only the running pair moves
            prev, cur, exponent = _rescale_pair(prev, cur, exponent, base)
            entries.append((cur, exponent))

    return ScaledCoefficientSequence(tuple(entries), float(rescale_base))


def evaluate_c_N(
    gamma: int | Parity,
    alpha: float,
    beta: float,
    N: int,
    backend: PrecisionBackend | None = None,
    rescale_base: float = RESCALE_BASE,
) -> tuple[int, float]:
    """(sign, log|c_N|) without keeping the sequence; alpha is not range-checked."""
    if int(N) != N or N < 1:
        raise ValueError(f"truncation order N must be an integer >= 1, got {N}")
    _check_beta(beta)
    backend = backend or PrecisionBackend.resolve()
    g = int(Parity.parse(gamma))
    log_base = math.log(rescale_base)

    with backend.context():
        a = backend.scalar(alpha)
        b = backend.scalar(beta)
        base = backend.scalar(rescale_base)
        prev, cur, exponent = backend.scalar(0), backend.scalar(1), 0
        for j in range(-1, N - 1):
            nxt = _a_term(g, a, b, j) * cur + _b_term(g, a, b, j) * prev
            if not backend.is_finite(nxt):
                raise ValueError(
                    f"non-finite recurrence value at c_{j + 2} (gamma={g}, alpha={alpha}, beta={beta})"
                )
            prev, cur, exponent = _rescale_pair(cur, nxt, exponent, base)
        if cur == 0:
            return 0, -math.inf
        sign = 1 if cur > 0 else -1
        return sign, float(mpmath.log(abs(cur))) + exponent * log_base


def c_N_sign_value(
    ctx: ModelContext,
    beta: float,
    N: int,
    backend: PrecisionBackend | None = None,
) -> tuple[int, float]:
    """(sign, log|c_N|) at (ctx, beta); the root-scan objective."""
    return evaluate_c_N(ctx.gamma, ctx.alpha, beta, N, backend)


@dataclass(frozen=True)
class RecurrenceTable:
    """Signs and log-magnitudes of c_N for several orders over a parameter grid."""

    orders: tuple[int, ...]
    signs: np.ndarray
    log_magnitudes: np.ndarray

    def row(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        k = self.orders.index(N)
        return self.signs[k], self.log_magnitudes[k]


def recurrence_table(
    gamma: int | Parity,
    alpha: Any,
    beta: Any,
    orders: Sequence[int],
    backend: PrecisionBackend | None = None,
    rescale_base: float = RESCALE_BASE,
) -> RecurrenceTable:
    """
    Vectorized recurrence over a grid of alpha or beta values (numpy broadcasting).

    All requested orders are read off a single pass to max(orders).
    """
    gamma = int(Parity.parse(gamma))
    orders = tuple(int(n) for n in orders)
    if not orders or min(orders) < 1:
        raise ValueError(f"orders must be non-empty integers >= 1, got {orders}")
    if list(orders) != sorted(set(orders)):
        raise ValueError(f"orders must be strictly increasing, got {orders}")
    backend = backend or PrecisionBackend.resolve()
    wanted = set(orders)
    n_max = orders[-1]
    log_base = math.log(rescale_base)

    with backend.context():
        a = backend.array(alpha)
        b = backend.array(beta)
        if np.any(b < 0):
            raise ValueError("beta grid must be >= 0")
        shape = np.broadcast(a, b).shape
        base = backend.scalar(rescale_base)
        prev = backend.array(np.zeros(shape))
        cur = backend.array(np.ones(shape))
        exponent = np.zeros(shape, dtype=np.int64)
        signs: dict[int, np.ndarray] = {}
        logs: dict[int, np.ndarray] = {}

        for j in range(-1, n_max - 1):
            nxt = _a_term(gamma, a, b, j) * cur + _b_term(gamma, a, b, j) * prev
            prev, cur = cur, nxt
            big = np.maximum(np.abs(prev), np.abs(cur))
            over = big > base
            under = (big < 1 / base) & (big > 0)
            if np.any(over):
                prev = np.where(over, prev / base, prev)
                cur = np.where(over, cur / base, cur)
                exponent = exponent + over.astype(np.int64)
            if np.any(under):
                prev = np.where(under, prev * base, prev)
                cur = np.where(under, cur * base, cur)
                exponent = exponent - under.astype(np.int64)
            order = j + 2
            if order in wanted:
                if not backend.all_finite(cur):
                    raise ValueError(f"non-finite recurrence values at order {order}")
                signs[order] = signs_of(cur)
                logs[order] = backend.log_abs(cur) + exponent * log_base

    return RecurrenceTable(
        orders=orders,
        signs=np.stack([signs[n] for n in orders]),
        log_magnitudes=np.stack([logs[n] for n in orders]),
    )


def recurrence_terms(gamma: int, alpha: Any, beta: Any, j: int) -> tuple[Any, Any]:
    """(A_j, B_j) for any scalar type supporting field arithmetic (float, mpf, sympy fractions)."""
    j = _check_index(j)
    return _a_term(int(gamma), alpha, beta, j), _b_term(int(gamma), alpha, beta, j)
