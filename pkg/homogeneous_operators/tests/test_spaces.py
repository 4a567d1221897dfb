"""
Tests for the weighted spaces and the matrix kernel B^(lambda, mu).

Run with: pytest homogeneous_operators/tests/test_spaces.py -v
"""

from fractions import Fraction

import numpy as np
import pytest

from homogeneous_operators.spaces import (
    WeightedSpaceDesc,
    check_god_identity,
    check_kernel_positivity,
    circle_grid,
    default_positivity_grid,
    gram_diagonal,
    gram_from_kernel,
    kernel_coefficient,
    kernel_mixed_derivative,
    matrix_kernel_B,
    scalar_gram,
)


class TestWeightedSpaceDesc:
    """Descriptor validation and derived sizes."""

    def test_dimensions(self):
        space = WeightedSpaceDesc(Fraction(5, 2), (1, 1, 2), 4)
        assert space.n == 3
        assert space.block_size == 5
        assert space.dimension == 15
        assert space.block_lambda(2) == Fraction(13, 2)
        assert space.exact

    def test_float_parameters_are_inexact(self):
        assert not WeightedSpaceDesc(2.5, (1,), 3).exact

    @pytest.mark.parametrize("lam, mu, degree", [
        (0, (1,), 3),
        (2, (1, -1), 3),
        (2, (1,), -1),
    ])
    def test_invalid(self, lam, mu, degree):
        with pytest.raises(ValueError):
            WeightedSpaceDesc(lam, mu, degree)


class TestGram:
    """Squared norms of monomials."""

    def test_lambda_one_is_hardy(self):
        assert list(scalar_gram(Fraction(1), 5)) == [1] * 6

    def test_examples(self):
        assert scalar_gram(Fraction(2), 1)[1] == Fraction(1, 2)
        assert scalar_gram(Fraction(2), 3)[3] == Fraction(6, 24)
        assert list(gram_diagonal(WeightedSpaceDesc(Fraction(2), (Fraction(4),), 0))) == [Fraction(1, 4)]

    def test_float_matches_exact(self):
        exact = scalar_gram(Fraction(5, 2), 10)
        approx = scalar_gram(2.5, 10)
        np.testing.assert_allclose(approx, np.asarray(exact, dtype=float), rtol=1e-14)

    def test_blocks_use_shifted_lambda(self):
        space = WeightedSpaceDesc(Fraction(2), (Fraction(1), Fraction(3)), 2)
        gram = gram_diagonal(space)
        assert list(gram[3:]) == [Fraction(1, 3), Fraction(1, 12), Fraction(1, 30)]

    @pytest.mark.parametrize("lam, mu", [
        (Fraction(5, 2), (Fraction(1), Fraction(1))),
        (Fraction(3), (Fraction(1), Fraction(1, 2), Fraction(2))),
    ])
    def test_gram_from_kernel_is_exact(self, lam, mu):
        space = WeightedSpaceDesc(lam, mu, 8)
        assert list(gram_from_kernel(space)) == list(gram_diagonal(space))


class TestKernel:
    """B^(lambda, mu)(z, w) and its coefficients."""

    def test_mixed_derivative_order_zero(self):
        z, w = 0.3 + 0.1j, -0.2 + 0.4j
        assert kernel_mixed_derivative(2.5, 0, 0, z, w) == pytest.approx((1 - z * np.conj(w)) ** -2.5)

    def test_value_at_origin(self):
        np.testing.assert_allclose(matrix_kernel_B(2, (1, 1), 0, 0), np.diag([1, 1.5]), atol=1e-15)

    def test_hermitian_symmetry(self):
        z, w = 0.4 - 0.2j, 0.1 + 0.5j
        lam, mu = Fraction(5, 2), (Fraction(1), Fraction(1, 2), Fraction(3))
        np.testing.assert_allclose(matrix_kernel_B(lam, mu, z, w),
                                   matrix_kernel_B(lam, mu, w, z).conj().T, atol=1e-12)

    def test_single_block_is_scalar_kernel(self):
        z, w = 0.5j, 0.3
        value = matrix_kernel_B(3, (2,), z, w)
        assert value.shape == (1, 1)
        assert value[0, 0] == pytest.approx(2 * (1 - z * np.conj(w)) ** -3)

    def test_coefficient_degree_rule(self):
        lam, mu = Fraction(2), (Fraction(1), Fraction(1, 2))
        assert kernel_coefficient(lam, mu, 0, 1, 0, 0) == 0
        assert kernel_coefficient(lam, mu, 1, 1, 0, 0) == 1
        assert kernel_coefficient(lam, mu, 0, 0, 1, 1) == 2

    def test_coefficients_sum_to_kernel(self):
        lam, mu = Fraction(5, 2), (Fraction(1), Fraction(1))
        z, w = 0.2 + 0.1j, -0.15j
        u = np.conj(w)
        for l in range(2):
            for p in range(2):
                series = sum(float(kernel_coefficient(lam, mu, l, p, x, x + l - p)) * z ** x * u ** (x + l - p)
                             for x in range(60) if x + l - p >= 0)
                assert series == pytest.approx(matrix_kernel_B(lam, mu, z, w)[l, p], abs=1e-12)


class TestGodIdentity:
    """(1 - z conj w) B^(lambda, mu) = B^(lambda-1, mu'')."""

    def test_generic(self, generic_parameters):
        lam, mu = generic_parameters
        assert check_god_identity(lam, mu, 40)

    @pytest.mark.slow
    @pytest.mark.parametrize("lam, mu", [
        (Fraction(5, 2), (Fraction(1), Fraction(1))),
        (Fraction(7), (Fraction(1), Fraction(2, 3), Fraction(1, 2))),
        (Fraction(2), (Fraction(1), Fraction(1, 2))),
    ])
    def test_to_total_degree_forty(self, lam, mu):
        assert check_god_identity(lam, mu, 40)

    def test_zero_doubleprime_weight(self):
        assert check_god_identity(Fraction(2), (Fraction(1), Fraction(1, 2)), 20)

    def test_single_block(self):
        assert check_god_identity(Fraction(2), (Fraction(1),), 20)

    def test_needs_lambda_above_one(self):
        with pytest.raises(ValueError):
            check_god_identity(Fraction(1, 2), (Fraction(1),), 5)


class TestPositivity:
    """Sampled positivity of the kernel."""

    def test_grids(self):
        assert len(default_positivity_grid()) == 25
        assert all(abs(abs(z) - 0.9) < 1e-15 for z in circle_grid(0.9, 24))

    def test_contractive_parameters_are_positive(self):
        assert check_kernel_positivity(2, (1, 1), default_positivity_grid()) >= -1e-10

    def test_negative_weight_at_origin(self):
        assert check_kernel_positivity(2, (1, -1), [0j]) == pytest.approx(-0.5)

    def test_small_negative_weight_is_detected(self):
        assert check_kernel_positivity(2, (1, -0.1), circle_grid(0.9, 24)) < -1e-6
