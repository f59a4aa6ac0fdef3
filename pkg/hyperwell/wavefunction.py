"""
Real-space eigenfunctions rebuilt from the Frobenius series in xi = sech^2 z

    phi(z) = sech^beta(z) * tanh(z)^gamma * exp(alpha xi / 2) * y(xi),   y = sum_j c_j xi^j
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, replace
from enum import StrEnum
from typing import TYPE_CHECKING, Any

import mpmath
import numpy as np
from scipy.integrate import simpson

from .asymptotics import potential_shape
from .model import ModelContext, Parity
from .oracle import NODE_FLOOR, OracleSolution, suggest_half_width
from .precision import PrecisionBackend, recommended_bits
from .recurrence import coefficient_sequence
from .utils.logging import get_logger

if TYPE_CHECKING:
    from .exact import PolynomialSolution
    from .spectrum import Eigenvalue

log = get_logger(__name__)

DEFAULT_STEP = 0.01
TAIL_TOL = 1e-12
MAX_ORDER_FACTOR = 4
_UNDERFLOW_LOG = -745.0


class WavefunctionSource(StrEnum):
    EXACT_POLYNOMIAL = "exact-polynomial"
    NUMERIC_SERIES = "numeric-series"
    ORACLE = "oracle"


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    z_grid: np.ndarray
    values: np.ndarray
    parity: Parity
    norm: float
    source: WavefunctionSource
    epsilon: float | None = None
    order: int | None = None

    @property
    def h(self) -> float:
        return float(self.z_grid[1] - self.z_grid[0])


def default_half_width(beta: float) -> float:
    """max(12, z_+ + 14 ln(10)/beta), so exp(-beta z) is below 1e-14 at the wall."""
    return suggest_half_width(beta)


def symmetric_grid(half_width: float, h: float = DEFAULT_STEP) -> np.ndarray:
    """Odd-length grid with step exactly h, mirror symmetric about z = 0; L is rounded up to a multiple of h."""
    if not (half_width > 0 and h > 0):
        raise ValueError(f"half width and step must be positive, got L={half_width}, h={h}")
    n_half = max(2, int(math.ceil(half_width / h - 1e-9)))
    right = h * np.arange(n_half + 1)
    return np.concatenate([-right[:0:-1], right])


def _log_sech(az: np.ndarray) -> np.ndarray:
    return -az + math.log(2.0) - np.log1p(np.exp(-2.0 * az))


def _series_scaled(coeffs: Sequence[Any], xi: np.ndarray, backend: PrecisionBackend) -> tuple[np.ndarray, float]:
    """y(xi) / max|c| as floats, and log max|c|."""
    if backend.is_native:
        c = np.asarray([float(v) for v in coeffs], dtype=float)
        scale = float(np.max(np.abs(c)))
        if scale == 0 or not math.isfinite(scale):
            raise ValueError("series coefficients must be finite and not all zero")
        return np.polynomial.polynomial.polyval(xi, c / scale), math.log(scale)
    with backend.context():
        c = [mpmath.mpf(v) for v in coeffs]
        scale = max(abs(v) for v in c)
        if scale == 0 or not mpmath.isfinite(scale):
            raise ValueError("series coefficients must be finite and not all zero")
        c = [v / scale for v in reversed(c)]
        y = np.array([float(mpmath.polyval(c, mpmath.mpf(float(x)))) for x in xi], dtype=float)
        return y, float(mpmath.log(scale))


def evaluate_phi(
    gamma: int | Parity,
    alpha: float,
    beta: float,
    series_coeffs: Sequence[Any],
    z: Any,
    backend: PrecisionBackend | None = None,
) -> Any:
    """
    phi(z) for coefficients c_0, c_1, ... of y(xi), carrying their overall scale.

    Evaluated on |z| and extended with sign(z)^gamma, so parity holds exactly.
    """
    gamma = Parity.parse(gamma)
    if not beta > 0:
        raise ValueError(f"beta must be > 0 to build a bound state, got {beta}")
    if len(series_coeffs) == 0:
        raise ValueError("series_coeffs must not be empty")
    backend = backend or PrecisionBackend.resolve()
    zz = np.asarray(z, dtype=float)
    az = np.abs(np.atleast_1d(zz))
    xi = np.exp(2.0 * _log_sech(az))
    log_prefactor = beta * _log_sech(az) + 0.5 * alpha * xi

    out = np.zeros_like(az)
    live = log_prefactor > _UNDERFLOW_LOG - 100.0
    if np.any(live):
        y, log_scale = _series_scaled(series_coeffs, xi[live], backend)
        mag = np.exp(np.minimum(log_prefactor[live] + log_scale, 709.0))
        out[live] = mag * y
    if gamma == Parity.ODD:
        # (1 - xi)^(1/2) sign(z) = tanh z
        out = out * np.tanh(np.atleast_1d(zz))
    return float(out[0]) if zz.ndim == 0 else out.reshape(zz.shape)


def _grid_values(
    gamma: Parity,
    alpha: float,
    beta: float,
    coeffs: Sequence[Any],
    z: np.ndarray,
    backend: PrecisionBackend,
) -> np.ndarray:
    """Evaluate on the non-negative half and mirror onto the negative half."""
    if not np.array_equal(z, -z[::-1]):
        return evaluate_phi(gamma, alpha, beta, coeffs, z, backend)
    n = z.size
    half = z[n // 2 :]
    right = evaluate_phi(gamma, alpha, beta, coeffs, half, backend)
    left = right[1:][::-1] if n % 2 else right[::-1]
    if gamma == Parity.ODD:
        left = -left
    return np.concatenate([left, right])


def _tail_ratio(coeffs: Sequence[Any], y_peak: float) -> float:
    last = max(abs(float(c)) for c in coeffs[-2:])
    return last / y_peak if y_peak > 0 else math.inf


def _backend_for(alpha: float, backend: PrecisionBackend | None) -> PrecisionBackend:
    if backend is not None:
        return backend
    resolved = PrecisionBackend.resolve()
    return PrecisionBackend(max(resolved.bits, recommended_bits(alpha)))


def wavefunction_from_eigenvalue(
    ctx: ModelContext,
    eig: Eigenvalue,
    z: np.ndarray | None = None,
    h: float = DEFAULT_STEP,
    backend: PrecisionBackend | None = None,
) -> GridWavefunction:
    """
    Sum the series at the converged beta to N_final terms.

    Convergence near xi = 1 is checked empirically: while the last terms exceed
    1e-12 of the largest |y| the order is doubled, up to 4 N_final.
    """
    if eig.parity != ctx.gamma:
        raise ValueError(f"eigenvalue parity {eig.parity.label} does not match context {ctx.gamma.label}")
    backend = _backend_for(ctx.alpha, backend)
    if z is None:
        z = symmetric_grid(default_half_width(eig.beta), h)
    xi_max = float(np.exp(2.0 * _log_sech(np.min(np.abs(z)))))

    N = eig.N_final
    while True:
        seq = coefficient_sequence(ctx, eig.beta, N, backend)
        with backend.context():
            coeffs = seq.normalized()
        y_probe, _ = _series_scaled(coeffs, np.linspace(0.0, xi_max, 64), backend)
        ratio = _tail_ratio(coeffs, float(np.max(np.abs(y_probe))))
        if ratio <= TAIL_TOL or N >= MAX_ORDER_FACTOR * eig.N_final:
            break
        N *= 2
    if ratio > TAIL_TOL:
        log.warning("wavefunction.series_tail", nu=eig.nu, beta=eig.beta, order=N, tail=ratio)

    values = _grid_values(ctx.gamma, ctx.alpha, eig.beta, coeffs, z, backend)
    w = GridWavefunction(
        z_grid=z,
        values=values,
        parity=ctx.gamma,
        norm=_l2_norm(z, values),
        source=WavefunctionSource.NUMERIC_SERIES,
        epsilon=eig.epsilon,
        order=N,
    )
    return align_sign(w)


def wavefunction_from_solution(
    sol: PolynomialSolution,
    z: np.ndarray | None = None,
    h: float = DEFAULT_STEP,
) -> GridWavefunction:
    """phi^(n,i) from the terminating polynomial y = c_0 + ... + c_n xi^n."""
    if z is None:
        z = symmetric_grid(default_half_width(sol.beta), h)
    backend = PrecisionBackend()
    values = _grid_values(sol.gamma, sol.alpha, sol.beta, sol.coeffs_float, z, backend)
    w = GridWavefunction(
        z_grid=z,
        values=values,
        parity=sol.gamma,
        norm=_l2_norm(z, values),
        source=WavefunctionSource.EXACT_POLYNOMIAL,
        epsilon=sol.epsilon,
        order=sol.n,
    )
    return align_sign(w)


def from_oracle_vector(solution: OracleSolution, index: int) -> GridWavefunction:
    if not 0 <= index < len(solution.levels):
        raise ValueError(f"oracle level {index} out of range (have {len(solution.levels)})")
    level = solution.levels[index]
    values = np.asarray(solution.vectors[:, index], dtype=float)
    z = solution.z
    w = GridWavefunction(
        z_grid=z,
        values=values,
        parity=level.parity,
        norm=_l2_norm(z, values),
        source=WavefunctionSource.ORACLE,
        epsilon=level.epsilon,
    )
    return align_sign(w)


def _l2_norm(z: np.ndarray, values: np.ndarray) -> float:
    return float(math.sqrt(max(simpson(values * values, x=z), 0.0)))


def align_sign(w: GridWavefunction) -> GridWavefunction:
    """
    Fix the global sign: odd states rise through the origin, even states are
    positive at z = 0 (or at their peak when phi(0) is negligible).
    """
    v = w.values
    peak = float(np.max(np.abs(v)))
    if peak == 0:
        return w
    floor = NODE_FLOOR * peak
    z = w.z_grid
    if w.parity == Parity.ODD:
        right = np.flatnonzero((z > 0) & (np.abs(v) > floor))
        ref = v[right[0]] if right.size else v[int(np.argmax(np.abs(v)))]
    else:
        centre = int(np.argmin(np.abs(z)))
        ref = v[centre] if abs(v[centre]) > floor else v[int(np.argmax(np.abs(v)))]
    if ref < 0:
        return replace(w, values=-v)
    return w


def normalize(w: GridWavefunction) -> GridWavefunction:
    norm = _l2_norm(w.z_grid, w.values)
    if not (norm > 0 and math.isfinite(norm)):
        raise ValueError(f"cannot normalize a wavefunction with norm {norm}")
    return replace(w, values=w.values / norm, norm=1.0)


def count_nodes(w: GridWavefunction, floor: float = NODE_FLOOR) -> int:
    """
    Strict sign changes between samples above floor * max|phi|.

    Sub-floor sign flips between the outermost significant samples are
    reported as ambiguous but not counted.
    """
    v = w.values
    peak = float(np.max(np.abs(v)))
    if peak == 0:
        raise ValueError("cannot count nodes of a vanishing wavefunction")
    big = np.abs(v) > floor * peak
    kept = v[big]
    nodes = int(np.count_nonzero(np.signbit(kept[1:]) != np.signbit(kept[:-1])))

    idx = np.flatnonzero(big)
    inner = v[idx[0] : idx[-1] + 1]
    inner = inner[inner != 0]
    raw = int(np.count_nonzero(np.signbit(inner[1:]) != np.signbit(inner[:-1])))
    if raw != nodes:
        log.warning("wavefunction.ambiguous_node", counted=nodes, raw=raw, floor=floor)
    return nodes


def shape_expectation(w: GridWavefunction) -> float:
    """<sinh^4 z / cosh^6 z>, divided by the norm so unnormalized input is fine."""
    weight = w.values * w.values
    norm2 = simpson(weight, x=w.z_grid)
    if not norm2 > 0:
        raise ValueError("wavefunction has zero norm")
    return float(simpson(weight * potential_shape(w.z_grid), x=w.z_grid) / norm2)


def to_rows(w: GridWavefunction) -> list[dict[str, float]]:
    return [{"z": float(a), "phi": float(b)} for a, b in zip(w.z_grid, w.values)]
