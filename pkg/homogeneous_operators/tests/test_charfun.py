"""
Tests for defect operators, characteristic functions, the product formula
and coincidence alignment.

Run with: pytest homogeneous_operators/tests/test_charfun.py -v
"""

import csv
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import unitary_group

from homogeneous_operators.blockops import build_A
from homogeneous_operators.charfun import (
    CharFunSample,
    SampleForm,
    check_adjoint_duality,
    check_covariance,
    coincidence_align,
    defect_restricted_singular_values,
    defect_sqrt,
    derivative_adjoint_orthonormal,
    entrywise_discrepancy,
    export_samples_csv,
    master_check,
    master_check_at_origin,
    radial_probe,
    theta_direct,
    theta_generic,
    theta_scalar,
    y_coefficients,
)
from homogeneous_operators.config import DEFAULT_Z_GRID
from homogeneous_operators.exceptions import AlignmentError, ContractionError, NonGenericParametersError
from homogeneous_operators.mobius import IDENTITY, involution_at, rotation

SMALL_GRID = [0j, 0.3, -0.2 + 0.25j, 0.35j]


class TestDefectOperators:
    """D and D_* by eigendecomposition."""

    def test_zero_operator(self):
        d, d_star = defect_sqrt(np.zeros((3, 3)))
        np.testing.assert_allclose(d, np.eye(3))
        np.testing.assert_allclose(d_star, np.eye(3))

    def test_scalar_multiple(self):
        d, d_star = defect_sqrt(0.6 * np.eye(2))
        np.testing.assert_allclose(d, 0.8 * np.eye(2), atol=1e-14)
        np.testing.assert_allclose(d_star, 0.8 * np.eye(2), atol=1e-14)

    def test_truncated_shift_defects(self):
        d, d_star = defect_sqrt(np.eye(4, k=-1))
        np.testing.assert_allclose(d, np.diag([0, 0, 0, 1]), atol=1e-14)
        np.testing.assert_allclose(d_star, np.diag([1, 0, 0, 0]), atol=1e-14)

    def test_rectangular(self):
        d, d_star = defect_sqrt(0.5 * np.ones((2, 3)) / 3)
        assert d.shape == (3, 3)
        assert d_star.shape == (2, 2)

    def test_rejects_non_contraction(self):
        with pytest.raises(ContractionError):
            defect_sqrt(1.5 * np.eye(2))


class TestDirectForm:
    """Theta_hat(z) = theta(z) D."""

    def test_zero_operator_gives_z(self):
        np.testing.assert_allclose(theta_direct(np.zeros((3, 3)), 0.4j), 0.4j * np.eye(3), atol=1e-14)

    def test_at_origin(self):
        np.testing.assert_allclose(theta_direct(0.5 * np.eye(2), 0), -0.5 * math.sqrt(0.75) * np.eye(2),
                                   atol=1e-14)

    def test_scalar_blaschke_factor(self):
        t, z = 0.4, 0.3 - 0.2j
        value = theta_direct(np.array([[t]]), z)[0, 0]
        assert value == pytest.approx(math.sqrt(1 - t ** 2) * (z - t) / (1 - z * t))

    def test_restricted_singular_values_of_scalar(self):
        t, z = 0.4, 0.3 - 0.2j
        values = defect_restricted_singular_values(np.array([[t]]), z)
        assert values[0] == pytest.approx(abs((z - t) / (1 - z * t)))

    def test_squared_restricted_values(self):
        t, z = 0.4, 0.3 - 0.2j
        values = defect_restricted_singular_values(np.array([[t]]), z, squared=True)
        assert values[0] == pytest.approx(abs((z - t) / (1 - z * t)) ** 2)

    def test_restricted_values_need_strict_contraction(self):
        with pytest.raises(ContractionError):
            defect_restricted_singular_values(np.eye(4, k=-1), 0.2)


class TestExplicitProduct:
    """theta_lambda and theta^(lambda, mu) from the discrete series."""

    def test_scalar_at_origin(self):
        lam = 2.5
        sample = theta_scalar(lam, 0, 8)
        expected = derivative_adjoint_orthonormal(lam - 1, 1, 8) / math.sqrt(lam * (lam - 1))
        np.testing.assert_allclose(sample.matrix, expected, atol=1e-14)
        assert sample.form == SampleForm.EXPLICIT_PRODUCT

    def test_scalar_needs_lambda_above_one(self):
        with pytest.raises(ValueError):
            theta_scalar(1, 0.2, 6)

    def test_single_block_y(self):
        y = y_coefficients(Fraction(5, 2), (Fraction(1),))
        assert y[0, 0] == pytest.approx(-1)

    def test_single_block_forms_agree(self):
        lam, mu = Fraction(5, 2), (Fraction(1),)
        forms = theta_generic(lam, mu, 0.3 - 0.1j, 12, 4)
        scalar = theta_scalar(lam, 0.3 - 0.1j, 12).matrix
        np.testing.assert_allclose(forms.entrywise_form.matrix, -scalar, atol=1e-13)
        np.testing.assert_allclose(forms.matrix_form.matrix, forms.entrywise_form.matrix, atol=1e-12)

    def test_generic_sample_shape(self, generic_parameters):
        lam, mu = generic_parameters
        sample = theta_generic(lam, mu, 0.2j, 9).matrix_form
        assert sample.matrix.shape == (20, 20)
        assert sample.block_count == 2
        assert sample.interior_block().shape == (8, 8)

    def test_rejects_non_generic(self):
        with pytest.raises(NonGenericParametersError):
            theta_generic(Fraction(2), (Fraction(1), Fraction(1, 2)), 0.1, 6)

    def test_origin_identity_is_exact(self, generic_parameters):
        lam, mu = generic_parameters
        result = master_check_at_origin(lam, mu, 12)
        assert result.passed
        assert result.exact

    @pytest.mark.slow
    def test_product_formula(self, generic_parameters):
        lam, mu = generic_parameters
        for z in (0.3, -0.2 + 0.25j):
            assert master_check(lam, mu, z, 24, 6) < 1e-6

    @pytest.mark.slow
    def test_entrywise_form(self, generic_parameters):
        lam, mu = generic_parameters
        assert entrywise_discrepancy(lam, mu, 0.25 + 0.1j, 24, 6) < 1e-8


class TestCoincidenceInvariants:
    """Covariance and duality compared through singular values."""

    def test_covariance_identity_map(self, scaled_shift):
        assert check_covariance(scaled_shift, IDENTITY, SMALL_GRID) < 1e-12

    def test_covariance_rotation(self, scaled_shift):
        assert check_covariance(scaled_shift, rotation(1j), SMALL_GRID) < 1e-10

    def test_covariance_involution(self, scaled_shift):
        assert check_covariance(scaled_shift, involution_at(0.3), SMALL_GRID) < 1e-8

    def test_duality(self, scaled_shift):
        assert check_adjoint_duality(scaled_shift, SMALL_GRID) < 1e-8

    def test_covariance_on_compression(self, generic_parameters):
        lam, mu = generic_parameters
        a = build_A(lam, mu, 24, exact=False)
        compressed = build_A(lam, mu, 12, exact=False)
        f = involution_at(0.3)
        assert check_covariance(a, f, SMALL_GRID, 12) == pytest.approx(check_covariance(compressed, f, SMALL_GRID))

    def test_covariance_negative_degree(self, scaled_shift):
        with pytest.raises(ValueError):
            check_covariance(scaled_shift, IDENTITY, SMALL_GRID, -1)

    @pytest.mark.slow
    def test_covariance_of_generic_operator(self, generic_parameters):
        lam, mu = generic_parameters
        a = build_A(lam, mu, 48, exact=False)
        grid = [z for z in DEFAULT_Z_GRID if abs(z) <= 0.4]
        assert check_covariance(a, involution_at(0.3), grid, 48) < 1e-5

    @pytest.mark.slow
    def test_duality_of_generic_operator(self, generic_parameters):
        lam, mu = generic_parameters
        a = build_A(lam, mu, 48, exact=False)
        assert check_adjoint_duality(a, DEFAULT_Z_GRID) < 1e-10

    def test_radial_probe_is_contractive(self, scaled_shift):
        maxima = radial_probe(scaled_shift, (0.3, 0.6, 0.9))
        assert len(maxima) == 3
        assert all(0 <= m <= 1 + 1e-10 for m in maxima)


class TestAlignment:
    """Unitary alignment of sample sets."""

    @pytest.fixture
    def samples(self, rng):
        return [rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(4)]

    def test_identical(self, samples):
        result = coincidence_align(samples, samples)
        assert result.residual < 1e-10
        assert not result.rank_deficient

    def test_global_phase(self, samples):
        rotated = [np.exp(0.8j) * s for s in samples]
        result = coincidence_align(samples, rotated)
        assert result.residual < 1e-10
        np.testing.assert_allclose(result.left @ result.left.conj().T, np.eye(3), atol=1e-12)

    def test_left_unitary(self, samples):
        u = unitary_group.rvs(3, random_state=5)
        result = coincidence_align(samples, [u @ s for s in samples])
        assert result.residual < 1e-10

    def test_rectangular_is_rank_deficient(self, rng):
        samples = [rng.normal(size=(2, 3)) for _ in range(2)]
        assert coincidence_align(samples, samples).rank_deficient

    @pytest.mark.parametrize("first, second", [
        ([], []),
        ([np.eye(2), np.eye(2)], [np.eye(2)]),
        ([np.eye(2)], [np.eye(3)]),
    ])
    def test_mismatched_sets(self, first, second):
        with pytest.raises(AlignmentError):
            coincidence_align(first, second)


class TestExport:
    """CSV export of samples."""

    def test_rows(self, tmp_path):
        samples = [CharFunSample(z, np.full((2, 2), 1 + 2j), SampleForm.DIRECT, 1, 1) for z in (0j, 0.5j)]
        path = export_samples_csv(samples, tmp_path / "theta.csv")
        with path.open() as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["re_z", "im_z", "row", "col", "re", "im"]
        assert len(rows) == 9
        assert rows[-1][1] == "0.5"
        assert rows[-1][4:] == ["1.0", "2.0"]
