"""
Tests for the finite-difference oracle
"""

import ast
import json
from pathlib import Path

import numpy as np
import pytest

from hyperwell.asymptotics import Z_PLUS
from hyperwell.model import Parity
from hyperwell.oracle import (
    MAX_HALF_WIDTH,
    OracleConfig,
    fd_solve,
    fd_spectrum,
    richardson_levels,
    suggest_half_width,
)
from tests.conftest import EPSILON_N0, V0_N0


@pytest.mark.unit
class TestOracleConfig:
    """Grid geometry"""

    def test_defaults(self) -> None:
        cfg = OracleConfig()
        assert cfg.L == 12.0
        assert cfg.M == 4001
        assert cfg.h == pytest.approx(24.0 / 4002)
        assert cfg.grid.size == cfg.M

    def test_grid_contains_origin(self) -> None:
        """Odd M puts the middle sample at z = 0"""
        cfg = OracleConfig(L=3.0, M=11)
        assert cfg.grid[5] == pytest.approx(0.0, abs=1e-15)
        assert cfg.grid[0] == pytest.approx(-3.0 + cfg.h)

    @pytest.mark.parametrize("kwargs", [{"M": 4000}, {"M": 1}, {"L": 0.0}, {"k": 0}, {"M": 400_001}])
    def test_rejects_bad_values(self, kwargs: dict) -> None:
        with pytest.raises(ValueError):
            OracleConfig(**kwargs)

    def test_halved_grid_is_nested(self) -> None:
        cfg = OracleConfig(L=2.0, M=9)
        fine = cfg.halved()
        assert fine.M == 19
        assert fine.h == pytest.approx(cfg.h / 2)
        np.testing.assert_allclose(fine.grid[1::2], cfg.grid, atol=1e-14)

    def test_for_half_width(self) -> None:
        cfg = OracleConfig.for_half_width(30.0)
        assert cfg.M % 2 == 1
        assert cfg.h <= 0.006 + 1e-12
        capped = OracleConfig.for_half_width(200.0, max_points=1001)
        assert capped.M == 1001


@pytest.mark.unit
class TestHalfWidth:
    """Box size from the slowest decay"""

    def test_minimum_width(self) -> None:
        assert suggest_half_width(10.0) == 12.0

    def test_decay_driven_width(self) -> None:
        assert suggest_half_width(0.5) == pytest.approx(Z_PLUS + 14.0 * np.log(10.0) / 0.5)

    def test_cap(self) -> None:
        assert suggest_half_width(1e-3) == MAX_HALF_WIDTH

    def test_rejects_zero(self) -> None:
        with pytest.raises(ValueError):
            suggest_half_width(0.0)


@pytest.mark.integration
class TestSpectrum:
    """Bound levels of the discretized operator"""

    def test_shallow_well_single_level(self) -> None:
        """v0 = 4 with k = 3 leaves one negative eigenvalue"""
        levels = fd_spectrum(4.0, OracleConfig(k=3))
        assert len(levels) == 1
        assert levels[0].parity == Parity.EVEN
        assert levels[0].nodes == 0
        assert levels[0].epsilon < 0.0

    def test_two_levels_alternate(self) -> None:
        levels = fd_spectrum(10.0)
        assert [lv.parity for lv in levels] == [Parity.EVEN, Parity.ODD]
        assert [lv.nodes for lv in levels] == [0, 1]
        assert levels[0].epsilon < levels[1].epsilon < 0.0

    def test_polynomial_ground_state(self) -> None:
        """epsilon_0 at v0 = (4 + sqrt 13)^2 within the h^2 error"""
        (ground, *_rest) = fd_spectrum(V0_N0)
        assert ground.epsilon == pytest.approx(EPSILON_N0, abs=1e-3)

    def test_levels_above_well_bottom(self) -> None:
        v0 = 100.0
        for level in fd_spectrum(v0):
            assert -4.0 * v0 / 27.0 < level.epsilon < 0.0

    def test_short_box_is_flagged(self, mocker) -> None:
        """A box at L = 6 clips the weakly bound tail"""
        mock_log = mocker.patch("hyperwell.oracle.log")
        solution = fd_solve(4.3, OracleConfig(L=6.0, M=2001))
        assert any(solution.contaminated)
        events = [c.args[0] for c in mock_log.warning.call_args_list]
        assert "oracle.boundary_contamination" in events

    def test_flags_are_plain_python(self) -> None:
        solution = fd_solve(4.3, OracleConfig(L=6.0, M=2001))
        assert all(type(flag) is bool for flag in solution.contaminated)
        assert all(type(level.nodes) is int for level in solution.levels)
        json.dumps([[lv.nodes, flag] for lv, flag in zip(solution.levels, solution.contaminated)])

    def test_vectors_match_levels(self) -> None:
        solution = fd_solve(30.0, OracleConfig(L=12.0, M=1201))
        assert solution.vectors.shape == (1201, len(solution.levels))
        np.testing.assert_array_equal(solution.z, solution.config.grid)


@pytest.mark.integration
class TestRichardson:
    """One grid halving"""

    def test_extrapolation_beats_coarse_level(self) -> None:
        (ground, *_rest) = richardson_levels(V0_N0)
        assert abs(ground.extrapolated - EPSILON_N0) < abs(ground.epsilon - EPSILON_N0)
        assert abs(ground.extrapolated - EPSILON_N0) <= max(1e-6, abs(ground.error_estimate))
        assert ground.parity == Parity.EVEN


@pytest.mark.unit
class TestIndependence:
    """The oracle shares only the potential with the series branch"""

    def test_no_recurrence_imports(self) -> None:
        source = Path(__file__).parent.parent / "hyperwell" / "oracle.py"
        tree = ast.parse(source.read_text())
        imported = set()
        for node in ast.walk(tree):
            if isinstance(node, ast.ImportFrom) and node.module:
                imported.add(node.module)
            elif isinstance(node, ast.Import):
                imported.update(alias.name for alias in node.names)
        forbidden = {"recurrence", "exact", "spectrum", "wavefunction"}
        assert not any(name.split(".")[-1] in forbidden for name in imported)
