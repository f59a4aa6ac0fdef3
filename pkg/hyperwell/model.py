"""
Model parameters shared by every solver branch
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

SQRT27 = math.sqrt(27.0)


class Parity(IntEnum):
    """Parity selector gamma: 0 for even states, 1 for odd states"""

    EVEN = 0
    ODD = 1

    @classmethod
    def parse(cls, value: int | str | Parity) -> Parity:
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("even", "0"):
                return cls.EVEN
            if key in ("odd", "1"):
                return cls.ODD
            raise ValueError(f"parity must be 'even' or 'odd', got {value!r}")
        if value not in (0, 1):
            raise ValueError(f"parity gamma must be 0 or 1, got {value!r}")
        return cls(int(value))

    @property
    def label(self) -> str:
        return self.name.lower()


def check_v0(v0: float) -> float:
    v0 = float(v0)
    if not math.isfinite(v0) or v0 <= 0:
        raise ValueError(f"v0 must be a positive finite number, got {v0}")
    return v0


def alpha_from_v0(v0: float) -> float:
    """alpha = -sqrt(v0); the negative root is the one carrying bound states."""
    return -math.sqrt(check_v0(v0))


def beta_upper_bound(alpha: float) -> float:
    return 2.0 * abs(alpha) / SQRT27


@dataclass(frozen=True)
class ModelContext:
    """
    Immutable (gamma, alpha) pair. v0 and the beta bound are derived on access.

    Bound states satisfy 0 < beta < 2|alpha|/sqrt(27), i.e.
    -4 v0 / 27 < epsilon = -beta^2 < 0.
    """

    gamma: Parity
    alpha: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", Parity.parse(self.gamma))
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha >= 0:
            raise ValueError(f"alpha must be finite and strictly negative, got {self.alpha}")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def from_v0(cls, v0: float, gamma: int | Parity = Parity.EVEN) -> ModelContext:
        return cls(gamma=Parity.parse(gamma), alpha=alpha_from_v0(v0))

    @property
    def v0(self) -> float:
        return self.alpha * self.alpha

    @property
    def beta_max(self) -> float:
        return beta_upper_bound(self.alpha)

    @property
    def epsilon_floor(self) -> float:
        """Lower energy bound -4 v0 / 27 (the well depth)."""
        return -4.0 * self.v0 / 27.0

    def with_parity(self, gamma: int | Parity) -> ModelContext:
        return ModelContext(gamma=Parity.parse(gamma), alpha=self.alpha)
