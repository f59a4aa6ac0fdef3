"""
Potential geometry, harmonic asymptotes and dimensional conversions
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np

from .model import Parity, check_v0

if TYPE_CHECKING:
    from .spectrum import ScanConfig

Z_PLUS = math.log(math.sqrt(3.0) + math.sqrt(2.0))
SHAPE_MAX = 4.0 / 27.0


def potential_shape(z: Any) -> Any:
    """sinh^4 z / cosh^6 z = tanh^4 z * sech^2 z, overflow free for any |z|."""
    az = np.abs(z)
    e = np.exp(-2.0 * az)
    sech = 2.0 * np.exp(-az) / (1.0 + e)
    tanh = (1.0 - e) / (1.0 + e)
    out = tanh**4 * sech**2
    return float(out) if np.ndim(out) == 0 else out


def potential(z: Any, v0: float) -> Any:
    """v(z) = -v0 sinh^4 z / cosh^6 z (scalar or array z)."""
    return -check_v0(v0) * potential_shape(z)


@dataclass(frozen=True)
class WellGeometry:
    z_plus: float
    z_minus: float
    depth: float
    curvature: float

    @property
    def quadratic_coefficient(self) -> float:
        return self.curvature / 2.0


def well_geometry(v0: float) -> WellGeometry:
    """Minima at z = +-ln(sqrt3 + sqrt2), depth -4 v0/27, v'' = 16 v0/27 there."""
    v0 = check_v0(v0)
    return WellGeometry(
        z_plus=Z_PLUS,
        z_minus=-Z_PLUS,
        depth=-4.0 * v0 / 27.0,
        curvature=16.0 * v0 / 27.0,
    )


def harmonic_asymptote(v0: float, nu: int) -> float:
    """-4 v0/27 + 2 sqrt(2 v0/27) (2 nu + 1)."""
    v0 = check_v0(v0)
    if int(nu) != nu or nu < 0:
        raise ValueError(f"nu must be an integer >= 0, got {nu}")
    return -4.0 * v0 / 27.0 + 2.0 * math.sqrt(2.0 * v0 / 27.0) * (2 * nu + 1)


# ---- dimensional maps -------------------------------------------------------


@dataclass(frozen=True)
class DimensionfulParams:
    mass: float
    width: float
    depth: float
    hbar: float = 1.0

    def __post_init__(self) -> None:
        for name in ("mass", "width", "depth", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")

    @property
    def energy_unit(self) -> float:
        """hbar^2 / (2 m d^2)."""
        return self.hbar**2 / (2.0 * self.mass * self.width**2)


def to_dimensionless(p: DimensionfulParams) -> float:
    """v0 = 2 m d^2 V0 / hbar^2."""
    return p.depth / p.energy_unit


def from_dimensionless(epsilon: float, p: DimensionfulParams) -> float:
    """E = hbar^2 epsilon / (2 m d^2)."""
    return epsilon * p.energy_unit


def to_dimensionless_energy(energy: float, p: DimensionfulParams) -> float:
    return energy / p.energy_unit


# ---- Hellmann-Feynman -------------------------------------------------------


@dataclass(frozen=True)
class HellmannFeynmanResult:
    v0: float
    nu: int
    delta: float
    lhs: float
    rhs: float
    scheme: str

    @property
    def abs_diff(self) -> float:
        return abs(self.lhs - self.rhs)

    def as_tuple(self) -> tuple[float, float, float]:
        return self.lhs, self.rhs, self.abs_diff


def hellmann_feynman_check(
    v0: float,
    nu: int,
    delta: float | None = None,
    cfg: ScanConfig | None = None,
) -> HellmannFeynmanResult:
    """
    d epsilon_nu / d v0 by finite differences against -<sinh^4/cosh^6> in the
    normalized state at v0.

    Central differences with delta = 1e-3 v0 by default. If the state is not
    bound at v0 - delta, a one-sided Richardson estimate 2 D(delta/2) - D(delta)
    from v0 upward is used instead.
    """
    from .spectrum import ScanConfig, eigenvalues
    from .wavefunction import normalize, shape_expectation, wavefunction_from_eigenvalue
    from .model import ModelContext

    v0 = check_v0(v0)
    if int(nu) != nu or nu < 0:
        raise ValueError(f"nu must be an integer >= 0, got {nu}")
    cfg = cfg or ScanConfig()
    delta = 1e-3 * v0 if delta is None else float(delta)
    if not 0 < delta < v0:
        raise ValueError(f"delta must lie in (0, v0), got {delta}")

    parity = Parity(nu % 2)
    rank = nu // 2

    def level(strength: float) -> Any:
        states = eigenvalues(ModelContext.from_v0(strength, parity), cfg)
        return states[rank] if rank < len(states) else None

    centre = level(v0)
    if centre is None:
        raise ValueError(f"state nu={nu} is not bound at v0={v0}")
    upper = level(v0 + delta)
    if upper is None:
        raise ValueError(f"state nu={nu} disappears between v0 and v0+delta ({v0 + delta})")
    lower = level(v0 - delta)
    if lower is not None:
        lhs = (upper.epsilon - lower.epsilon) / (2.0 * delta)
        scheme = "central"
    else:
        half = level(v0 + delta / 2.0)
        if half is None:
            raise ValueError(f"state nu={nu} disappears inside the window at v0={v0}")
        d_full = (upper.epsilon - centre.epsilon) / delta
        d_half = (half.epsilon - centre.epsilon) / (delta / 2.0)
        lhs = 2.0 * d_half - d_full
        scheme = "forward-richardson"

    w = normalize(wavefunction_from_eigenvalue(ModelContext.from_v0(v0, parity), centre))
    rhs = -shape_expectation(w)
    return HellmannFeynmanResult(v0=v0, nu=int(nu), delta=delta, lhs=lhs, rhs=rhs, scheme=scheme)
