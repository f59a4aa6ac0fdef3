"""
Tests for the three-term recurrence, its rescaled evaluation and the grid tables
"""

import math

import mpmath
import numpy as np
import pytest

from hyperwell.model import ModelContext, Parity
from hyperwell.precision import PrecisionBackend
from hyperwell.recurrence import (
    RESCALE_BASE,
    c_N_sign_value,
    coeff_A,
    coeff_A_even,
    coeff_B,
    coeff_B_even,
    coefficient_sequence,
    evaluate_c_N,
    recurrence_table,
    recurrence_terms,
)
from tests.conftest import ALPHA_N0, BETA_N0


@pytest.mark.unit
class TestCoefficients:
    """Closed-form values of A_j and B_j"""

    def test_first_step_even(self) -> None:
        """A_{-1}(0, -3, 1) = 5/8 and B_{-1}(0, -3, 1) = 3/4"""
        ctx = ModelContext(Parity.EVEN, -3.0)
        assert coeff_A(ctx, 1.0, -1) == pytest.approx(5 / 8, rel=1e-15)
        assert coeff_B(ctx, 1.0, -1) == pytest.approx(3 / 4, rel=1e-15)

    def test_first_step_odd(self) -> None:
        """The odd sector shifts beta + gamma in A only through the quadratic"""
        ctx = ModelContext(Parity.ODD, -3.0)
        assert coeff_A(ctx, 1.0, -1) == pytest.approx(9 / 8, rel=1e-15)
        assert coeff_B(ctx, 1.0, -1) == pytest.approx(-3 * (-3 + 2 + 2 - 4 + 3) / 8, rel=1e-15)

    def test_zero_coupling(self) -> None:
        """A_0(0, 0, 0) = 3/8"""
        assert coeff_A_even(0.0, 0.0, 0) == pytest.approx(3 / 8)
        assert recurrence_terms(0, 0.0, 0.0, 0)[0] == pytest.approx(3 / 8)

    @pytest.mark.parametrize("j", [-2, 1.5])
    def test_bad_index(self, j: float) -> None:
        with pytest.raises(ValueError, match="recurrence index"):
            coeff_A(ModelContext(Parity.EVEN, -1.0), 1.0, j)  # type: ignore[arg-type]

    def test_negative_beta(self) -> None:
        with pytest.raises(ValueError, match="beta"):
            coeff_B(ModelContext(Parity.EVEN, -1.0), -0.1, 0)

    @pytest.mark.timeout(60)
    def test_even_reduction_random(self) -> None:
        """The even-sector forms equal the general ones at gamma = 0"""
        rng = np.random.default_rng(20240611)
        alphas = rng.uniform(-50.0, -1e-3, 10_000)
        betas = rng.uniform(0.0, 20.0, 10_000)
        js = rng.integers(-1, 61, 10_000)
        for alpha, beta, j in zip(alphas, betas, js, strict=True):
            general_a, general_b = recurrence_terms(0, alpha, beta, int(j))
            assert math.isclose(coeff_A_even(alpha, beta, int(j)), general_a, rel_tol=1e-12, abs_tol=1e-14)
            assert math.isclose(coeff_B_even(alpha, beta, int(j)), general_b, rel_tol=1e-12, abs_tol=1e-14)

    def test_recurrence_terms_accepts_mpf(self) -> None:
        with mpmath.workdps(40):
            a, b = recurrence_terms(1, mpmath.mpf(-3), mpmath.mpf(1), -1)
        assert isinstance(a, mpmath.mpf)
        assert float(a) == pytest.approx(9 / 8)
        assert isinstance(b, mpmath.mpf)


@pytest.mark.unit
class TestCoefficientSequence:
    """Sequential evaluation with running-pair rescaling"""

    def test_starts_at_one(self) -> None:
        seq = coefficient_sequence(ModelContext(Parity.EVEN, -3.0), 1.0, 1)
        assert seq.order == 1
        assert seq.values() == [1.0, pytest.approx(5 / 8)]

    def test_truncation_point_vanishes(self) -> None:
        """At the n = 0 polynomial solution c_1 and c_2 both vanish"""
        seq = coefficient_sequence(ModelContext(Parity.EVEN, ALPHA_N0), BETA_N0, 4)
        values = seq.values()
        assert values[0] == 1.0
        assert abs(seq.as_mpf()[1]) < 1e-13
        assert abs(seq.as_mpf()[2]) < 1e-13

    def test_rejects_bad_order(self) -> None:
        ctx = ModelContext(Parity.EVEN, -3.0)
        with pytest.raises(ValueError, match="truncation order"):
            coefficient_sequence(ctx, 1.0, 0)
        with pytest.raises(ValueError, match="rescale_base"):
            coefficient_sequence(ctx, 1.0, 5, rescale_base=1.0)

    def test_rescale_base_does_not_change_values(self) -> None:
        """Scaling by powers of two is exact, so the represented values agree"""
        ctx = ModelContext(Parity.ODD, -12.0)
        a = coefficient_sequence(ctx, 1.7, 80).as_mpf()
        b = coefficient_sequence(ctx, 1.7, 80, rescale_base=2.0**60).as_mpf()
        for x, y in zip(a, b, strict=True):
            assert x == y or abs(x - y) <= mpmath.mpf(1e-14) * abs(x)

    def test_large_orders_stay_finite(self) -> None:
        """Coefficients that overflow binary64 keep finite mantissas"""
        ctx = ModelContext(Parity.EVEN, -40.0)
        seq = coefficient_sequence(ctx, 0.3, 400, rescale_base=2.0**20)
        assert all(math.isfinite(float(m)) for m, _ in seq.entries)
        assert any(e != 0 for _, e in seq.entries)
        assert math.isfinite(seq.log_magnitude(seq.order))

    def test_normalized_is_bounded(self) -> None:
        seq = coefficient_sequence(ModelContext(Parity.EVEN, -20.0), 2.0, 120, rescale_base=2.0**30)
        normed = seq.normalized()
        assert max(abs(float(v)) for v in normed) == pytest.approx(1.0)
        assert all(abs(float(v)) <= 1.0 for v in normed)

    def test_mp_backend(self) -> None:
        """The mpmath backend agrees with binary64 where both are accurate"""
        ctx = ModelContext(Parity.EVEN, -5.0)
        native = coefficient_sequence(ctx, 0.8, 30).as_mpf()
        wide = coefficient_sequence(ctx, 0.8, 30, backend=PrecisionBackend(128)).as_mpf()
        for x, y in zip(native, wide, strict=True):
            assert float(x) == pytest.approx(float(y), rel=1e-8, abs=1e-12)


@pytest.mark.unit
class TestEvaluateCN:
    """Sign and log-magnitude of the last coefficient"""

    def test_matches_sequence(self) -> None:
        ctx = ModelContext(Parity.ODD, -9.0)
        seq = coefficient_sequence(ctx, 1.3, 50)
        sign, log_mag = evaluate_c_N(Parity.ODD, -9.0, 1.3, 50)
        assert sign == seq.sign(50)
        assert log_mag == pytest.approx(seq.log_magnitude(50), rel=1e-12, abs=1e-9)

    def test_sign_value_wrapper(self) -> None:
        ctx = ModelContext(Parity.EVEN, -6.0)
        assert c_N_sign_value(ctx, 0.9, 20) == evaluate_c_N(0, -6.0, 0.9, 20)

    def test_sign_change_across_exact_root(self) -> None:
        """c_2 changes sign across beta = (1 + sqrt 13)/2 at alpha = -4 - sqrt 13"""
        ctx = ModelContext(Parity.EVEN, ALPHA_N0)
        below, _ = c_N_sign_value(ctx, BETA_N0 - 1e-6, 2)
        above, _ = c_N_sign_value(ctx, BETA_N0 + 1e-6, 2)
        assert below * above == -1
        _, log_at = c_N_sign_value(ctx, BETA_N0, 2)
        assert log_at < math.log(1e-13)

    def test_exact_zero_at_zero_coupling(self) -> None:
        """At alpha = 0, beta = 0 the even chain is identically zero from c_1 on"""
        sign, log_mag = evaluate_c_N(0, 0.0, 0.0, 5)
        assert sign == 0
        assert log_mag == -math.inf


@pytest.mark.unit
class TestRecurrenceTable:
    """Vectorized evaluation over parameter grids"""

    def test_rows_match_scalar_path(self) -> None:
        betas = np.linspace(0.05, 2.5, 40)
        table = recurrence_table(Parity.EVEN, -8.0, betas, (10, 20, 30))
        signs, logs = table.row(20)
        for k in (0, 13, 39):
            sign, log_mag = evaluate_c_N(0, -8.0, betas[k], 20)
            assert signs[k] == sign
            assert logs[k] == pytest.approx(log_mag, rel=1e-10, abs=1e-9)

    def test_alpha_grid(self) -> None:
        alphas = np.linspace(-12.0, -1.0, 25)
        table = recurrence_table(Parity.ODD, alphas, 0.0, (15,))
        assert table.signs.shape == (1, 25)
        assert table.log_magnitudes.shape == (1, 25)

    def test_orders_validated(self) -> None:
        with pytest.raises(ValueError, match="orders"):
            recurrence_table(0, -3.0, np.array([1.0]), ())
        with pytest.raises(ValueError, match="strictly increasing"):
            recurrence_table(0, -3.0, np.array([1.0]), (20, 10))

    def test_negative_beta_grid(self) -> None:
        with pytest.raises(ValueError, match="beta grid"):
            recurrence_table(0, -3.0, np.array([-0.5, 1.0]), (5,))

    @pytest.mark.timeout(60)
    def test_signs_invariant_under_rescale_base(self) -> None:
        """Root locations depend only on signs, which scaling never touches"""
        rng = np.random.default_rng(7)
        alphas = rng.uniform(-30.0, -0.5, 1000)
        betas = rng.uniform(0.0, 10.0, 1000)
        a = recurrence_table(Parity.EVEN, alphas, betas, (40, 80))
        b = recurrence_table(Parity.EVEN, alphas, betas, (40, 80), rescale_base=2.0**40)
        assert np.array_equal(a.signs, b.signs)
        np.testing.assert_allclose(a.log_magnitudes, b.log_magnitudes, rtol=1e-10, atol=1e-8)

    def test_mp_table_agrees_with_native(self) -> None:
        betas = np.linspace(0.1, 1.5, 12)
        native = recurrence_table(Parity.ODD, -7.0, betas, (25,))
        wide = recurrence_table(Parity.ODD, -7.0, betas, (25,), backend=PrecisionBackend(100))
        assert np.array_equal(native.signs, wide.signs)
        np.testing.assert_allclose(native.log_magnitudes, wide.log_magnitudes, rtol=1e-8, atol=1e-6)

    def test_default_base(self) -> None:
        assert RESCALE_BASE == 2.0**500
