"""
Pytest configuration and fixtures
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project root to Python path for testing
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from hyperwell.spectrum import ScanConfig  # noqa: E402

# n = 0 even polynomial solution: alpha = -4 - sqrt(13), beta = (1 + sqrt(13)) / 2
ALPHA_N0 = -4.0 - math.sqrt(13.0)
BETA_N0 = (1.0 + math.sqrt(13.0)) / 2.0
V0_N0 = ALPHA_N0 * ALPHA_N0
EPSILON_N0 = -(7.0 + math.sqrt(13.0)) / 2.0

# Critical couplings alpha_1 .. alpha_9 and the digits each is known to
ALPHA_CRITICAL = {
    1: (-2.073164811, 5e-8),
    2: (-5.272715881, 5e-9),
    3: (-6.181847266, 5e-8),
    4: (-9.398121349, 5e-9),
    5: (-10.22002699, 5e-8),
    6: (-13.455570, 5e-6),
    7: (-14.2405704, 5e-6),
    8: (-17.4897, 5e-4),
    9: (-18.25373, 5e-4),
}


def random_v0(seed: int, size: int, low: float = 0.5, high: float = 100.0, margin: float = 0.05) -> np.ndarray:
    """Seeded uniform v0 draws, keeping clear of the binding thresholds alpha_K^2 by a relative margin"""
    rng = np.random.default_rng(seed)
    thresholds = np.array([alpha * alpha for alpha, _ in ALPHA_CRITICAL.values()])
    kept: list[float] = []
    while len(kept) < size:
        for v0 in rng.uniform(low, high, size):
            if np.all(np.abs(v0 / thresholds - 1.0) > margin):
                kept.append(float(v0))
    return np.array(kept[:size])


def pytest_configure(config: pytest.Config) -> None:
    """Register custom pytest markers"""
    config.addinivalue_line("markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')")
    config.addinivalue_line("markers", "integration: marks tests as integration tests")
    config.addinivalue_line("markers", "unit: marks tests as unit tests")
    config.addinivalue_line("markers", "timeout(seconds): fail the test once it runs longer than seconds")


@pytest.fixture(autouse=True)
def isolated_environment(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    """Default precision and a config path that does not exist"""
    monkeypatch.delenv("HYPERWELL_PRECISION_BITS", raising=False)
    monkeypatch.setenv("HYPERWELL_CONFIG", str(tmp_path / "hyperwell.json"))


@pytest.fixture
def quick_scan() -> ScanConfig:
    """Shallow-well scan settings that still converge to ~1e-9"""
    return ScanConfig(n_schedule=(20, 25, 30, 35, 40, 45, 50), grid_points=800)


@pytest.fixture
def deep_scan() -> ScanConfig:
    """Extended orders for v0 in the thousands"""
    return ScanConfig(n_schedule=tuple(range(60, 161, 10)), grid_points=1000)
