"""
Finite-difference oracle: -phi'' + v(z) phi = epsilon phi on [-L, L], Dirichlet walls.

Independent of the recurrence branch; only the potential is shared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .asymptotics import Z_PLUS, potential
from .model import Parity, check_v0
from .utils.logging import get_logger
from .utils.timing import log_step

log = get_logger(__name__)

CONTAMINATION_RATIO = 1e-8
NODE_FLOOR = 1e-10
MAX_POINTS = 200_001
MAX_HALF_WIDTH = 200.0


@dataclass(frozen=True)
class OracleConfig:
    L: float = 12.0
    M: int = 4001
    k: int = 40

    def __post_init__(self) -> None:
        if not (math.isfinite(self.L) and self.L > 0):
            raise ValueError(f"half width L must be positive, got {self.L}")
        if self.M < 3 or self.M % 2 == 0:
            raise ValueError(f"interior point count M must be odd and >= 3, got {self.M}")
        if self.M > MAX_POINTS:
            raise ValueError(f"M={self.M} exceeds the supported maximum {MAX_POINTS}")
        if self.k < 1:
            raise ValueError(f"level count k must be >= 1, got {self.k}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / (self.M + 1)

    @property
    def grid(self) -> np.ndarray:
        return -self.L + self.h * np.arange(1, self.M + 1)

    def halved(self) -> OracleConfig:
        """Nested grid with h/2 (M -> 2M + 1)."""
        return OracleConfig(L=self.L, M=2 * self.M + 1, k=self.k)

    @classmethod
    def for_half_width(cls, L: float, h_target: float = 0.006, k: int = 40, max_points: int = 20_001) -> OracleConfig:
        m = int(math.ceil(2.0 * L / h_target)) - 1
        m = min(max(m, 3), max_points)
        if m % 2 == 0:
            m += 1
        return cls(L=L, M=m, k=k)


class OracleLevel(NamedTuple):
    epsilon: float
    parity: Parity
    nodes: int


@dataclass(frozen=True)
class OracleSolution:
    v0: float
    config: OracleConfig
    levels: tuple[OracleLevel, ...]
    vectors: np.ndarray
    contaminated: tuple[bool, ...]

    @property
    def z(self) -> np.ndarray:
        return self.config.grid


def _count_sign_changes(values: np.ndarray) -> int:
    floor = NODE_FLOOR * float(np.max(np.abs(values)))
    kept = values[np.abs(values) > floor]
    return int(np.count_nonzero(np.signbit(kept[1:]) != np.signbit(kept[:-1])))


@log_step("oracle.solve")
def fd_solve(v0: float, cfg: OracleConfig | None = None) -> OracleSolution:
    """Lowest k eigenpairs of the tridiagonal operator, bound (epsilon < 0) ones kept."""
    v0 = check_v0(v0)
    cfg = cfg or OracleConfig()
    z = cfg.grid
    h2 = cfg.h * cfg.h
    diag = 2.0 / h2 + potential(z, v0)
    off = np.full(cfg.M - 1, -1.0 / h2)
    k = min(cfg.k, cfg.M)

    wall = abs(potential(cfg.L, v0))
    if wall > CONTAMINATION_RATIO * v0:
        log.warning("oracle.short_box", v0=v0, L=cfg.L, wall_potential=wall)

    values, vectors = eigh_tridiagonal(
        diag, off, select="i", select_range=(0, k - 1), lapack_driver="stebz"
    )
    bound = values < 0
    values, vectors = values[bound], vectors[:, bound]

    levels: list[OracleLevel] = []
    contaminated: list[bool] = []
    for idx, eps in enumerate(values):
        vec = vectors[:, idx]
        parity = Parity.EVEN if float(np.dot(vec, vec[::-1])) > 0 else Parity.ODD
        nodes = _count_sign_changes(vec)
        peak = float(np.max(np.abs(vec)))
        edge = max(abs(vec[0]), abs(vec[-1]))
        dirty = bool(edge > CONTAMINATION_RATIO * peak)
        if dirty:
            log.warning(
                "oracle.boundary_contamination",
                v0=v0,
                level=idx,
                epsilon=float(eps),
                edge_ratio=edge / peak,
                L=cfg.L,
            )
        levels.append(OracleLevel(float(eps), parity, nodes))
        contaminated.append(dirty)

    if len(values) == k:
        log.info("oracle.level_cap", v0=v0, k=k)
    return OracleSolution(v0, cfg, tuple(levels), vectors, tuple(contaminated))


def fd_spectrum(v0: float, cfg: OracleConfig | None = None) -> list[OracleLevel]:
    """(epsilon, parity, nodes) of every bound level among the lowest k."""
    return list(fd_solve(v0, cfg).levels)


class RichardsonLevel(NamedTuple):
    epsilon: float
    epsilon_half: float
    extrapolated: float
    error_estimate: float
    parity: Parity
    nodes: int


def richardson_levels(v0: float, cfg: OracleConfig | None = None) -> list[RichardsonLevel]:
    """
    One halving of h on the nested grid. error_estimate is the measured C h^2 of
    the coarse level, (4/3)(eps_h - eps_{h/2}).
    """
    cfg = cfg or OracleConfig()
    coarse = fd_spectrum(v0, cfg)
    fine = fd_spectrum(v0, cfg.halved())
    out: list[RichardsonLevel] = []
    for a, b in zip(coarse, fine):
        if a.parity != b.parity:
            log.warning("oracle.richardson_mismatch", v0=v0, epsilon=a.epsilon, fine=b.epsilon)
            break
        ch2 = 4.0 * (a.epsilon - b.epsilon) / 3.0
        out.append(
            RichardsonLevel(
                epsilon=a.epsilon,
                epsilon_half=b.epsilon,
                extrapolated=(4.0 * b.epsilon - a.epsilon) / 3.0,
                error_estimate=ch2,
                parity=a.parity,
                nodes=a.nodes,
            )
        )
    return out


def suggest_half_width(beta_min: float, z_plus: float = Z_PLUS, decades: float = 14.0) -> float:
    """Half width where exp(-beta z) has fallen by `decades` orders beyond the outer minimum."""
    if not beta_min > 0:
        raise ValueError(f"beta_min must be positive, got {beta_min}")
    width = max(12.0, z_plus + decades * math.log(10.0) / beta_min)
    if width > MAX_HALF_WIDTH:
        log.warning("oracle.half_width_capped", beta_min=beta_min, wanted=width, cap=MAX_HALF_WIDTH)
        width = MAX_HALF_WIDTH
    return width
