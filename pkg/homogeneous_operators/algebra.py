"""
Exact and floating scalar combinatorics and truncated power series.

Series coefficients live in a numpy array: complex128 for the floating
backend, object arrays of ``Fraction`` for the exact backend.
"""

import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Tuple, Union

import jax
import jax.numpy as jnp
from jax.experimental.jet import jet
import numpy as np

from .exceptions import ConfigurationError
from .mobius import MobiusMap, unimodular_power

jax.config.update("jax_enable_x64", True)

Number = Union[int, Fraction, float, complex]

MAX_JAX_ORDER = 12


def pochhammer(x: Number, p: int) -> Number:
    """Rising factorial (x)_p = x (x+1) ... (x+p-1); (x)_0 = 1."""
    if p < 0:
        raise ValueError("p must be non-negative")
    result = 1
    for i in range(p):
        result = result * (x + i)
    return result


def _exact_divide(numerator: Number, denominator: Number) -> Number:
    if isinstance(numerator, (int, Fraction)) and isinstance(denominator, (int, Fraction)):
        return Fraction(numerator) / Fraction(denominator)
    return numerator / denominator


def binomial(x: Number, k: int) -> Number:
    """Generalized binomial coefficient x (x-1) ... (x-k+1) / k!."""
    if k < 0:
        return 0
    return _exact_divide(pochhammer(x - k + 1, k), math.factorial(k))


def is_exact_array(values: np.ndarray) -> bool:
    return values.dtype == object


def exact_zeros(shape) -> np.ndarray:
    """Object array of ``Fraction(0)``."""
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


class TruncatedSeries:
    """
    Power series c_0 + c_1 z + ... + c_N z^N with all arithmetic mod z^(N+1).

    Binary operations truncate to the smaller degree of the operands.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Sequence[Number], degree: int = None):
        values = np.asarray(coefficients)
        exact = values.dtype == object
        if degree is None:
            degree = len(values) - 1
        if degree < 0:
            raise ValueError("degree must be non-negative")
        if exact:
            padded = exact_zeros(degree + 1)
            for i, c in enumerate(values[: degree + 1]):
                padded[i] = Fraction(c)
        else:
            padded = np.zeros(degree + 1, dtype=complex)
            padded[: min(len(values), degree + 1)] = values[: degree + 1]
        self.coefficients = padded

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def exact(self) -> bool:
        return is_exact_array(self.coefficients)

    @classmethod
    def monomial(cls, k: int, degree: int, exact: bool = False) -> "TruncatedSeries":
        values = exact_zeros(degree + 1) if exact else np.zeros(degree + 1, dtype=complex)
        if k <= degree:
            values[k] = Fraction(1) if exact else 1.0
        return cls(values, degree)

    @classmethod
    def from_mobius(cls, f: MobiusMap, degree: int) -> "TruncatedSeries":
        """Taylor coefficients of f: c_0 = -beta alpha, c_n = beta conj(alpha)^(n-1) (1 - |alpha|^2)."""
        values = np.zeros(degree + 1, dtype=complex)
        values[0] = -f.beta * f.alpha
        if degree >= 1:
            powers = f.alpha.conjugate() ** np.arange(degree)
            values[1:] = f.beta * (1 - abs(f.alpha) ** 2) * powers
        return cls(values, degree)

    def _like(self, values: np.ndarray) -> "TruncatedSeries":
        return TruncatedSeries(values, len(values) - 1)

    def _align(self, other: "TruncatedSeries") -> Tuple[np.ndarray, np.ndarray]:
        degree = min(self.degree, other.degree)
        a = self.coefficients[: degree + 1]
        b = other.coefficients[: degree + 1]
        if self.exact != other.exact:
            a = a.astype(complex)
            b = b.astype(complex)
        return a, b

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            a, b = self._align(other)
            return self._like(a + b)
        values = self.coefficients.copy()
        values[0] = values[0] + other
        return self._like(values)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.coefficients)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self._like(self.coefficients * other)
        a, b = self._align(other)
        degree = len(a) - 1
        if is_exact_array(a):
            out = exact_zeros(degree + 1)
            for i, ai in enumerate(a):
                if ai == 0:
                    continue
                for j in range(degree + 1 - i):
                    out[i + j] += ai * b[j]
            return self._like(out)
        return self._like(np.convolve(a, b)[: degree + 1])

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "TruncatedSeries":
        if not isinstance(k, int) or k < 0:
            return self.power(k)
        result = TruncatedSeries.monomial(0, self.degree, exact=self.exact)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        a, b = self._align(other)
        return bool(np.all(a == b))

    def __repr__(self) -> str:
        return f"TruncatedSeries(degree={self.degree}, coefficients={list(self.coefficients)})"

    def derivative(self) -> "TruncatedSeries":
        """Term-wise derivative; the top coefficient becomes 0."""
        size = self.degree + 1
        out = exact_zeros(size) if self.exact else np.zeros(size, dtype=complex)
        for n in range(1, size):
            out[n - 1] = n * self.coefficients[n]
        return self._like(out)

    def evaluate(self, z: complex) -> complex:
        result = 0
        for c in reversed(self.coefficients):
            result = result * z + c
        return result

    def exp(self) -> "TruncatedSeries":
        """exp of the series via n g_n = sum_k k h_k g_(n-k)."""
        if self.exact:
            if self.coefficients[0] != 0:
                raise ValueError("exact exp needs a zero constant term")
            g = exact_zeros(self.degree + 1)
            g[0] = Fraction(1)
            h = self.coefficients
            for n in range(1, self.degree + 1):
                g[n] = sum(k * h[k] * g[n - k] for k in range(1, n + 1)) / n
            return self._like(g)
        h = self.coefficients
        weighted = np.arange(self.degree + 1) * h
        g = np.zeros(self.degree + 1, dtype=complex)
        g[0] = 1.0
        for n in range(1, self.degree + 1):
            g[n] = np.dot(weighted[1: n + 1], g[n - 1:: -1][:n]) / n
        return self._like(np.exp(h[0]) * g)

    def log(self) -> "TruncatedSeries":
        """Principal logarithm; the constant term must be non-zero."""
        f = self.coefficients
        if f[0] == 0:
            raise ValueError("log needs a non-zero constant term")
        if self.exact:
            if f[0] != 1:
                raise ValueError("exact log needs constant term 1")
            g = exact_zeros(self.degree + 1)
            for n in range(1, self.degree + 1):
                g[n] = f[n] - sum(k * g[k] * f[n - k] for k in range(1, n)) / n
            return self._like(g)
        g = np.zeros(self.degree + 1, dtype=complex)
        g[0] = np.log(f[0])
        for n in range(1, self.degree + 1):
            k = np.arange(1, n)
            g[n] = (n * f[n] - np.dot(k * g[1:n], f[n - 1: 0: -1])) / (n * f[0])
        return self._like(g)

    def power(self, lam: float) -> "TruncatedSeries":
        """Principal power exp(lam log(series))."""
        return (self.log() * lam).exp()

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """The truncated polynomial of ``self`` evaluated at ``inner`` (Horner)."""
        degree = min(self.degree, inner.degree)
        if self.exact and inner.exact:
            result = TruncatedSeries(exact_zeros(degree + 1), degree)
        else:
            result = TruncatedSeries(np.zeros(degree + 1, dtype=complex), degree)
        inner = TruncatedSeries(inner.coefficients[: degree + 1], degree)
        for c in reversed(self.coefficients):
            result = result * inner + c
        return result


def series_compose_pow(f: MobiusMap, lam: float, k: int, degree: int) -> TruncatedSeries:
    """
    Taylor coefficients of z -> c(f, z)^lam f(z)^k up to ``degree``.

    The fractional power is taken factor-wise: s(beta)^lam (1 - |alpha|^2)^(lam/2)
    times the series (1 - conj(alpha) z)^(-lam).
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    lam = float(lam)
    scale = unimodular_power(f.beta, lam) * (1 - abs(f.alpha) ** 2) ** (lam / 2)
    factor = TruncatedSeries([1.0, -f.alpha.conjugate()], degree).power(-lam)
    result = factor * scale
    if k:
        result = result * (TruncatedSeries.from_mobius(f, degree) ** k)
    return result


def cauchy_coefficients(
        fn: Callable[[np.ndarray], np.ndarray],
        order: int,
        radius: float = 0.9,
        samples: int = 256,
) -> np.ndarray:
    """
    Taylor coefficients 0..order of a function holomorphic on a disc, by FFT.

    Samples ``fn`` on the circle of the given radius; the aliasing error of
    coefficient n is of the size of coefficient n + samples times radius^samples.
    """
    if samples <= order:
        raise ConfigurationError("samples must exceed order")
    points = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    values = np.asarray(fn(points), dtype=complex)
    coefficients = np.fft.fft(values, axis=0) / samples
    scale = radius ** -np.arange(order + 1)
    return coefficients[: order + 1] * scale.reshape((-1,) + (1,) * (values.ndim - 1))


def jax_taylor_coefficients(fn: Callable, order: int, center: complex = 0j) -> np.ndarray:
    """
    Taylor coefficients 0..order at ``center`` in one Taylor-mode pass.

    ``fn`` must be written with ``jax.numpy`` and map a complex scalar to a
    complex scalar. ``jet`` pushes the path center + t through ``fn`` and
    returns the derivatives d^n/dt^n, which are divided by n!.

    Raises:
        ConfigurationError: If order exceeds MAX_JAX_ORDER.
    """
    if order > MAX_JAX_ORDER:
        raise ConfigurationError(f"jax oracle supports order <= {MAX_JAX_ORDER}")
    point = jnp.asarray(center, dtype=jnp.complex128)
    if order == 0:
        return np.asarray([complex(fn(point))])
    path = [jnp.ones_like(point)] + [jnp.zeros_like(point)] * (order - 1)
    value, derivatives = jet(fn, (point,), (path,))
    terms = [complex(value)] + [complex(d) for d in derivatives]
    return np.asarray([term / math.factorial(n) for n, term in enumerate(terms)])


def jax_compose_pow(f: MobiusMap, lam: float, k: int) -> Callable:
    """The function z -> c(f, z)^lam f(z)^k written for the jax oracle."""
    lam = float(lam)
    scale = unimodular_power(f.beta, lam) * (1 - abs(f.alpha) ** 2) ** (lam / 2)
    alpha, beta = f.alpha, f.beta

    def fn(z):
        mobius = beta * (z - alpha) / (1 - jnp.conj(alpha) * z)
        return scale * jnp.exp(-lam * jnp.log(1 - jnp.conj(alpha) * z)) * mobius ** k

    return fn


def identity1_sides(lam: Number, j: int, l: int) -> Tuple[Number, Number]:
    """Both sides of the first Pochhammer identity, summing over i = j+1..l."""
    if not 0 <= j < l:
        raise ValueError("identity 1 needs 0 <= j < l")
    lhs = Fraction(0) if isinstance(lam, (int, Fraction)) else 0.0
    for i in range(j + 1, l + 1):
        numerator = pochhammer(j + 1, i - j) * binomial(l, i)
        denominator = pochhammer(lam + 2 * j, 2 * i - 2 * j - 1) * pochhammer(lam + 2 * i, l - i)
        lhs += _exact_divide(numerator, denominator)
    rhs = _exact_divide((l - j) * binomial(l, j), pochhammer(lam + 2 * j, l - j))
    return lhs, rhs


def identity2_sides(lam: Number, j: int, l: int) -> Tuple[Number, Number]:
    """Both sides of the second Pochhammer identity, summing over i = j..l."""
    if not 0 <= j <= l:
        raise ValueError("identity 2 needs 0 <= j <= l")
    lhs = Fraction(0) if isinstance(lam, (int, Fraction)) else 0.0
    for i in range(j, l + 1):
        numerator = pochhammer(j + 1, i - j) * binomial(l, i)
        denominator = pochhammer(lam + 2 * j, 2 * i - 2 * j) * pochhammer(lam + 2 * i + 1, l - i)
        lhs += _exact_divide(numerator, denominator)
    rhs = _exact_divide(binomial(l, j), pochhammer(lam + 2 * j, l - j))
    return lhs, rhs


def check_identity1(lam: Number, j: int, l: int) -> bool:
    lhs, rhs = identity1_sides(lam, j, l)
    return lhs == rhs


def check_identity2(lam: Number, j: int, l: int) -> bool:
    lhs, rhs = identity2_sides(lam, j, l)
    return lhs == rhs


def identity_failures(lams: Iterable[Number], max_l: int) -> list:
    """All (identity, lambda, j, l) for which an identity fails, up to l = max_l."""
    failures = []
    for lam in lams:
        for l in range(max_l + 1):
            for j in range(l + 1):
                if j < l and not check_identity1(lam, j, l):
                    failures.append((1, lam, j, l))
                if not check_identity2(lam, j, l):
                    failures.append((2, lam, j, l))
    return failures
