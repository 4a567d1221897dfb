"""
Tests for block operators, defect parameters and the exact operator identities.

Run with: pytest homogeneous_operators/tests/test_blockops.py -v
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from homogeneous_operators.algebra import exact_zeros
from homogeneous_operators.blockops import (
    BlockOperator,
    build_A,
    build_Bminus,
    build_Bplus,
    build_C,
    check_C_equation,
    check_defect_identity,
    compare_columns,
    contractivity_scan,
    defect_parameters,
    derivative_block,
    identity_operator,
    is_contractive,
    operator_norm,
    require_generic,
    weighted_adjoint,
    weighted_shift,
    x_coefficients,
)
from homogeneous_operators.config import Basis
from homogeneous_operators.exceptions import DimensionMismatchError, NonGenericParametersError
from homogeneous_operators.spaces import WeightedSpaceDesc


class TestBlockOperator:
    """Containers and arithmetic."""

    def test_shape_is_validated(self):
        space = WeightedSpaceDesc(Fraction(2), (Fraction(1),), 3)
        with pytest.raises(DimensionMismatchError):
            BlockOperator(np.zeros((3, 4)), space, space)

    def test_mixed_bases_rejected(self):
        shift = weighted_shift(Fraction(2), 4)
        with pytest.raises(DimensionMismatchError):
            shift @ shift.to_orthonormal()

    def test_identity_is_neutral(self):
        a = build_A(Fraction(5, 2), (Fraction(1), Fraction(1)), 5)
        one = identity_operator(a.domain)
        assert (one @ a).matrix.tolist() == a.matrix.tolist()

    def test_double_adjoint(self):
        a = build_A(Fraction(5, 2), (Fraction(1), Fraction(3, 2)), 6)
        twice = weighted_adjoint(weighted_adjoint(a))
        assert twice.matrix.tolist() == a.matrix.tolist()

    def test_orthonormal_adjoint_is_conjugate_transpose(self):
        a = build_A(2.5, (1.0, 1.0), 6).to_orthonormal()
        assert a.basis == Basis.ORTHONORMAL
        np.testing.assert_allclose(a.adjoint().matrix, a.matrix.conj().T)

    def test_weighted_adjoint_matches_orthonormal(self):
        a = build_A(Fraction(5, 2), (Fraction(1), Fraction(1)), 6)
        via_monomial = a.adjoint().to_orthonormal().matrix
        via_orthonormal = a.to_orthonormal().adjoint().matrix
        np.testing.assert_allclose(via_monomial, via_orthonormal, atol=1e-14)


class TestElementaryOperators:
    """Shift and derivative blocks."""

    def test_shift_weights(self):
        lam = Fraction(5, 2)
        shift = weighted_shift(lam, 8).to_orthonormal().matrix
        expected = [math.sqrt((d + 1) / (float(lam) + d)) for d in range(8)]
        np.testing.assert_allclose(np.diag(shift, -1).real, expected, atol=1e-14)

    def test_derivative_block(self):
        d2 = derivative_block(Fraction(2), 2, 6)
        assert d2.codomain.lam == 6
        assert d2.matrix[3, 5] == 20
        assert d2.matrix[:, :2].tolist() == exact_zeros((7, 2)).tolist()

    def test_negative_derivative_order(self):
        with pytest.raises(ValueError):
            derivative_block(Fraction(2), -1, 4)


class TestDefectParameters:
    """mu', mu'' and genericity."""

    def test_example(self, generic_parameters):
        lam, mu = generic_parameters
        params = defect_parameters(lam, mu)
        assert params.mu_prime == (Fraction(25, 11), Fraction(9, 7))
        assert params.mu_doubleprime == (Fraction(1), Fraction(11, 15))
        assert params.generic

    def test_single_block(self):
        params = defect_parameters(Fraction(3), (Fraction(2),))
        assert params.mu_prime == (Fraction(3),)
        assert params.mu_doubleprime == (Fraction(2),)

    def test_zero_doubleprime_is_not_generic(self):
        assert not defect_parameters(Fraction(2), (Fraction(1), Fraction(1, 2))).generic
        with pytest.raises(NonGenericParametersError):
            require_generic(Fraction(2), (Fraction(1), Fraction(1, 2)))

    def test_lambda_one_is_not_generic(self):
        with pytest.raises(NonGenericParametersError):
            require_generic(Fraction(1), (Fraction(1),))

    def test_x_coefficients_lower_pattern(self, generic_parameters):
        lam, mu = generic_parameters
        x = x_coefficients(lam, mu)
        assert x.shape == (2, 2)
        assert x[1, 0] > 0
        assert x[0, 0] < 0 and x[1, 1] < 0


class TestContractivity:
    """Norm of the truncated multiplication operator."""

    @pytest.mark.parametrize("lam, mu, expected", [
        (Fraction(5, 2), (Fraction(1), Fraction(1)), True),
        (Fraction(1), (Fraction(1),), True),
        (Fraction(1), (Fraction(1), Fraction(1)), False),
        (Fraction(1, 2), (Fraction(1),), False),
        (Fraction(3, 2), (Fraction(1), Fraction(1, 10)), False),
    ])
    def test_is_contractive(self, lam, mu, expected):
        assert is_contractive(lam, mu) is expected

    def test_contractive_norm(self, generic_parameters):
        lam, mu = generic_parameters
        assert operator_norm(build_A(lam, mu, 20)) <= 1 + 1e-12

    def test_scan_finds_growth(self):
        degree, norm = contractivity_scan(Fraction(3, 2), (Fraction(1), Fraction(1, 10)))
        assert degree == 8
        assert norm > 1.001

    def test_scan_contractive(self, generic_parameters):
        lam, mu = generic_parameters
        degree, norm = contractivity_scan(lam, mu, start=8, max_degree=32)
        assert degree is None
        assert norm <= 1 + 1e-12


class TestBuilders:
    """A, B+, B- and C."""

    def test_A_blocks(self):
        a = build_A(Fraction(3), (Fraction(1), Fraction(1)), 4)
        lower = a.block(1, 0)
        assert all(lower[d, d] == Fraction(-1, 3) for d in range(5))
        assert sum(v != 0 for v in lower.ravel()) == 5
        assert all(v == 0 for v in a.block(0, 1).ravel())
        assert a.block(0, 0)[1, 0] == 1

    def test_single_block_Bplus_weights(self):
        b = build_Bplus(Fraction(2), (Fraction(1),), degree=6).to_orthonormal().matrix
        expected = [math.sqrt(1 / (2 + d)) for d in range(7)]
        np.testing.assert_allclose(np.diag(b).real, expected, atol=1e-14)

    def test_Bminus_needs_lambda_above_one(self):
        with pytest.raises(NonGenericParametersError):
            build_Bminus(Fraction(1), (Fraction(1),), 4)

    def test_C_rejects_non_generic(self):
        with pytest.raises(NonGenericParametersError):
            build_C(Fraction(2), (Fraction(1), Fraction(1, 2)), 4)

    def test_builders_are_exact_for_rational_parameters(self, generic_parameters):
        lam, mu = generic_parameters
        assert build_A(lam, mu, 4).exact
        assert build_Bplus(lam, mu, degree=4).exact
        assert build_C(lam, mu, 4).exact
        assert not build_A(lam, mu, 4, exact=False).exact


class TestIdentities:
    """The defect identity and the C equation."""

    def test_compare_columns_locates_failure(self):
        space = WeightedSpaceDesc(Fraction(2), (Fraction(1), Fraction(1)), 4)
        matrix = exact_zeros((10, 10))
        matrix[0, 7] = Fraction(1, 3)
        result = compare_columns(BlockOperator(matrix, space, space), 3)
        assert not result
        assert result.first_failure == (1, 2)
        assert result.residual == pytest.approx(1 / 3)

    def test_compare_columns_ignores_outer_columns(self):
        space = WeightedSpaceDesc(Fraction(2), (Fraction(1),), 4)
        matrix = exact_zeros((5, 5))
        matrix[0, 4] = Fraction(1)
        assert compare_columns(BlockOperator(matrix, space, space), 3).passed

    def test_single_block_defect_identity(self):
        result = check_defect_identity(Fraction(2), (Fraction(1),), 10)
        assert result.passed and result.exact

    def test_defect_identity_exact(self, generic_parameters):
        lam, mu = generic_parameters
        result = check_defect_identity(lam, mu, 12)
        assert result.passed
        assert result.exact
        assert result.residual == 0

    def test_defect_identity_float(self):
        result = check_defect_identity(2.5, (1.0, 1.0), 12)
        assert result.passed
        assert not result.exact
        assert result.residual < 1e-12

    def test_C_equation_exact(self, generic_parameters):
        lam, mu = generic_parameters
        result = check_C_equation(lam, mu, 12)
        assert result.passed and result.exact

    @pytest.mark.slow
    @pytest.mark.parametrize("lam, mu, degree", [
        (Fraction(5, 2), (Fraction(1), Fraction(1)), 40),
        (Fraction(7), (Fraction(1), Fraction(1), Fraction(1)), 30),
    ])
    def test_identities_at_larger_truncation(self, lam, mu, degree):
        defect = check_defect_identity(lam, mu, degree)
        middle = check_C_equation(lam, mu, degree)
        assert defect.passed and defect.exact
        assert middle.passed and middle.exact

    @pytest.mark.parametrize("lam, mu", [
        (Fraction(5, 2), (Fraction(1), Fraction(1))),
        (Fraction(7), (Fraction(1), Fraction(2, 3), Fraction(1, 2))),
        (Fraction(7), (Fraction(1), Fraction(1), Fraction(1))),
        (Fraction(3), (Fraction(1),)),
    ])
    def test_truncated_norm_at_most_one(self, lam, mu):
        assert is_contractive(lam, mu)
        assert operator_norm(build_A(lam, mu, 60, exact=False)) <= 1 + 1e-12
