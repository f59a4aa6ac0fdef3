"""Argument validation for the command line and the config file"""

import argparse
import math
from pathlib import Path

from ..precision import NATIVE_BITS
from .logging import VALID_LEVELS


class ArgValidator:
    """argparse `type=` callables; bad input becomes a usage error (exit 2)"""

    @staticmethod
    def _number(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not math.isfinite(value):
            raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
        return value

    @staticmethod
    def _integer(text: str) -> int:
        try:
            return int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None

    @staticmethod
    def positive_float(text: str) -> float:
        value = ArgValidator._number(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
        return value

    @staticmethod
    def positive_int(text: str) -> int:
        value = ArgValidator._integer(text)
        if value < 1:
            raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
        return value

    @staticmethod
    def non_negative_int(text: str) -> int:
        value = ArgValidator._integer(text)
        if value < 0:
            raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
        return value

    @staticmethod
    def odd_int(text: str) -> int:
        value = ArgValidator.positive_int(text)
        if value < 3 or value % 2 == 0:
            raise argparse.ArgumentTypeError(f"must be odd and >= 3, got {text}")
        return value

    @staticmethod
    def precision_bits(text: str) -> int:
        value = ArgValidator._integer(text)
        if value < NATIVE_BITS:
            raise argparse.ArgumentTypeError(f"precision must be >= {NATIVE_BITS} bits, got {text}")
        return value

    @staticmethod
    def digits(text: str) -> int:
        value = ArgValidator._integer(text)
        if not 1 <= value <= 40:
            raise argparse.ArgumentTypeError(f"digits must lie in 1..40, got {text}")
        return value

    @staticmethod
    def log_level(text: str) -> str:
        if text.upper() not in VALID_LEVELS:
            raise argparse.ArgumentTypeError(f"log level must be one of {sorted(VALID_LEVELS)}, got {text!r}")
        return text.upper()

    @staticmethod
    def output_path(text: str) -> Path:
        """Destination file (parent directory must exist)"""
        path = Path(text.strip()).expanduser()
        if not text.strip():
            raise argparse.ArgumentTypeError("empty path")
        if not path.parent.exists():
            raise argparse.ArgumentTypeError(f"parent directory does not exist: {path.parent}")
        return path


def is_schedule(value: object) -> bool:
    """Strictly increasing list of orders >= 1"""
    if not isinstance(value, list) or not value:
        return False
    if not all(isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in value):
        return False
    return all(b > a for a, b in zip(value, value[1:]))


def is_positive_number(value: object) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value) and value > 0
