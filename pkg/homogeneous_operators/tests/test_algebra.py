"""
Tests for Pochhammer combinatorics, truncated series and the Taylor oracles.
"""

import cmath
import math
from fractions import Fraction

import jax
import jax.numpy as jnp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from homogeneous_operators.algebra import (
    MAX_JAX_ORDER,
    TruncatedSeries,
    binomial,
    cauchy_coefficients,
    check_identity1,
    check_identity2,
    identity1_sides,
    identity_failures,
    jax_compose_pow,
    jax_taylor_coefficients,
    pochhammer,
    series_compose_pow,
)
from homogeneous_operators.exceptions import ConfigurationError
from homogeneous_operators.mobius import IDENTITY, MobiusMap, cocycle_c, cocycle_power, involution_at, rotation

jax.config.update("jax_enable_x64", True)

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=12)


def exact_series(values):
    return TruncatedSeries(np.array([Fraction(v) for v in values], dtype=object))


class TestPochhammer:
    """Rising factorials and binomials."""

    def test_examples(self):
        assert pochhammer(Fraction(5, 2), 0) == 1
        assert pochhammer(2, 3) == 24
        assert pochhammer(Fraction(1, 2), 2) == Fraction(3, 4)

    def test_rejects_negative_order(self):
        with pytest.raises(ValueError):
            pochhammer(2, -1)

    def test_binomial(self):
        assert binomial(5, 2) == 10
        assert binomial(Fraction(1, 2), 2) == Fraction(-1, 8)
        assert binomial(4, -1) == 0


class TestIdentities:
    """The two Pochhammer identities in exact arithmetic."""

    def test_first_identity_example(self):
        assert identity1_sides(Fraction(2), 0, 1) == (Fraction(1, 2), Fraction(1, 2))
        assert check_identity1(Fraction(5, 2), 1, 3)

    def test_second_identity_examples(self):
        assert check_identity2(Fraction(2), 0, 0)
        assert check_identity2(Fraction(3), 0, 2)

    def test_first_identity_needs_j_below_l(self):
        with pytest.raises(ValueError):
            identity1_sides(Fraction(2), 2, 2)

    @pytest.mark.parametrize("lam", [Fraction(2), Fraction(5, 2), Fraction(7)])
    def test_exhaustive_sweep(self, lam):
        assert identity_failures([lam], 30) == []

    def test_perturbed_side_is_detected(self):
        lhs, rhs = identity1_sides(Fraction(7, 3), 2, 6)
        assert lhs == rhs
        assert lhs + Fraction(1, 10 ** 12) != rhs


class TestTruncatedSeries:
    """Ring operations modulo z^(N+1)."""

    @given(st.lists(rationals, min_size=4, max_size=4),
           st.lists(rationals, min_size=4, max_size=4),
           st.lists(rationals, min_size=4, max_size=4))
    @settings(max_examples=40, deadline=None)
    def test_exact_ring_laws(self, a, b, c):
        f, g, h = exact_series(a), exact_series(b), exact_series(c)
        assert f * g == g * f
        assert (f * g) * h == f * (g * h)
        leibniz = f.derivative() * g + f * g.derivative()
        assert list((f * g).derivative().coefficients[:-1]) == list(leibniz.coefficients[:-1])

    def test_leibniz_below_top_degree(self):
        f = exact_series([1, 2, 0, Fraction(1, 3), 5])
        g = exact_series([Fraction(1, 2), 0, -1, 4, 2])
        lhs = (f * g).derivative().coefficients[:-1]
        rhs = (f.derivative() * g + f * g.derivative()).coefficients[:-1]
        assert list(lhs) == list(rhs)

    def test_truncates_to_smaller_degree(self):
        f = TruncatedSeries([1.0, 1.0, 1.0, 1.0])
        g = TruncatedSeries([1.0, 1.0])
        assert (f * g).degree == 1

    def test_exact_exp_log_inverse(self):
        f = exact_series([0, 1, Fraction(1, 2), -2, 3])
        assert f.exp().log() == f

    def test_float_power(self):
        base = TruncatedSeries([1.0, -0.5], 6)
        series = base.power(-2).coefficients
        reference = np.array([(n + 1) * 0.5 ** n for n in range(7)])
        np.testing.assert_allclose(series, reference, atol=1e-14)

    def test_integer_power_and_compose(self):
        f = TruncatedSeries([0.0, 1.0, 0.5, 0.0, 0.0])
        squared = f ** 2
        np.testing.assert_allclose(squared.coefficients, [0, 0, 1, 1, 0.25])
        identity = TruncatedSeries([0.0, 1.0, 0.0, 0.0, 0.0])
        np.testing.assert_allclose(f.compose(identity).coefficients, f.coefficients)

    def test_evaluate(self):
        f = TruncatedSeries([1.0, 2.0, 3.0])
        assert f.evaluate(0.5) == pytest.approx(2.75)

    def test_log_needs_nonzero_constant(self):
        with pytest.raises(ValueError):
            TruncatedSeries([0.0, 1.0]).log()


class TestComposePower:
    """Taylor coefficients of c(f, z)^lambda f(z)^k."""

    def test_identity_gives_monomial(self):
        series = series_compose_pow(IDENTITY, 2.5, 3, 8).coefficients
        expected = np.zeros(9)
        expected[3] = 1
        np.testing.assert_allclose(series, expected, atol=1e-15)

    def test_rotation_without_cocycle(self):
        beta = cmath.exp(0.9j)
        series = series_compose_pow(rotation(beta), 0, 1, 4).coefficients
        np.testing.assert_allclose(series, [0, beta, 0, 0, 0], atol=1e-15)

    def test_involution_derivative_series(self):
        series = series_compose_pow(involution_at(0.5), 2, 0, 2).coefficients
        np.testing.assert_allclose(series, [-0.75, -0.75, -0.5625], atol=1e-14)

    def test_square_of_cocycle(self):
        f = MobiusMap(0.3 + 0.2j, cmath.exp(-1.3j))
        series = series_compose_pow(f, 2, 0, 12)
        values = [series.evaluate(z) for z in (0.1, -0.2j)]
        np.testing.assert_allclose(values, [cocycle_c(f, z) ** 2 for z in (0.1, -0.2j)], atol=1e-12)

    def test_against_jax_oracle(self, rng):
        for _ in range(4):
            f = MobiusMap(0.4 * rng.uniform() * cmath.exp(2j * np.pi * rng.uniform()),
                          cmath.exp(2j * np.pi * rng.uniform()))
            for k in range(3):
                series = series_compose_pow(f, 2.5, k, 20).coefficients[: MAX_JAX_ORDER + 1]
                oracle = jax_taylor_coefficients(jax_compose_pow(f, 2.5, k), MAX_JAX_ORDER)
                np.testing.assert_allclose(series, oracle, atol=1e-12)

    def test_against_cauchy_oracle(self):
        f = MobiusMap(-0.35 + 0.1j, 1j)
        series = series_compose_pow(f, 1.5, 2, 20).coefficients
        fft = cauchy_coefficients(lambda z: cocycle_power(f, z, 1.5) * f(z) ** 2, 20)
        np.testing.assert_allclose(series, fft, atol=1e-12)

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError):
            series_compose_pow(IDENTITY, 1, 0, -1)


class TestOracles:
    """jax and FFT coefficient oracles."""

    def test_jax_order_limit(self):
        with pytest.raises(ConfigurationError):
            jax_taylor_coefficients(lambda z: z, MAX_JAX_ORDER + 1)

    def test_jax_geometric_series(self):
        coefficients = jax_taylor_coefficients(lambda z: 1 / (1 - 0.5 * z), 6)
        np.testing.assert_allclose(coefficients, 0.5 ** np.arange(7), atol=1e-14)

    def test_cauchy_geometric_series(self):
        coefficients = cauchy_coefficients(lambda z: 1 / (1 - 0.5 * z), 10)
        np.testing.assert_allclose(coefficients, 0.5 ** np.arange(11), atol=1e-14)

    def test_cauchy_needs_enough_samples(self):
        with pytest.raises(ConfigurationError):
            cauchy_coefficients(lambda z: z, 10, samples=8)

    def test_jax_exponential(self):
        coefficients = jax_taylor_coefficients(lambda z: jnp.exp(z), 5)
        np.testing.assert_allclose(coefficients, [1, 1, 1 / 2, 1 / 6, 1 / 24, 1 / 120], atol=1e-14)

    def test_jax_full_order_off_center(self):
        center = 0.2 - 0.1j
        coefficients = jax_taylor_coefficients(lambda z: jnp.exp(z), MAX_JAX_ORDER, center)
        expected = [cmath.exp(center) / math.factorial(n) for n in range(MAX_JAX_ORDER + 1)]
        np.testing.assert_allclose(coefficients, expected, rtol=1e-12)

    def test_jax_order_zero(self):
        np.testing.assert_allclose(jax_taylor_coefficients(lambda z: 3 * z + 1, 0, 0.5), [2.5])
