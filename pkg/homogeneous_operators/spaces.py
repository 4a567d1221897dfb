"""
Weighted spaces H^(lambda+2j) with mu-weights and the matrix kernel B^(lambda, mu).

A space with kernel mu K is the same function space as the one with kernel
K, with squared norms divided by mu. Block j of a WeightedSpaceDesc is
H^(lambda+2j) with kernel mu_j (1 - z conj(w))^-(lambda+2j), so the degree-d
monomial has squared norm d! / (mu_j (lambda+2j)_d).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigvalsh

from .algebra import exact_zeros, pochhammer
from .config import Scalar, is_rational
from .logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class WeightedSpaceDesc:
    """
    Descriptor of the truncated space (+)_j H^(lambda+2j) with weights mu.

    Attributes:
        lam: Lowest block parameter lambda.
        mu: Positive block weights mu_0..mu_{n-1}.
        degree: Highest monomial degree N kept in every block.
    """
    lam: Scalar
    mu: Tuple[Scalar, ...]
    degree: int

    def __post_init__(self):
        object.__setattr__(self, 'mu', tuple(self.mu))
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if any(m <= 0 for m in self.mu):
            raise ValueError("mu entries must be positive")
        if self.degree < 0:
            raise ValueError("degree must be non-negative")

    @property
    def n(self) -> int:
        return len(self.mu)

    @property
    def block_size(self) -> int:
        return self.degree + 1

    @property
    def dimension(self) -> int:
        return self.n * self.block_size

    @property
    def exact(self) -> bool:
        return is_rational(self.lam) and all(is_rational(m) for m in self.mu)

    def block_lambda(self, j: int) -> Scalar:
        return self.lam + 2 * j


def scalar_gram(lam: Scalar, degree: int, weight: Scalar = 1, exact: Optional[bool] = None) -> np.ndarray:
    """Squared norms d! / (weight (lam)_d) of z^d, d = 0..degree."""
    if exact is None:
        exact = is_rational(lam) and is_rational(weight)
    if exact:
        out = exact_zeros(degree + 1)
        value = 1 / Fraction(weight)
        lam = Fraction(lam)
    else:
        out = np.zeros(degree + 1)
        value = 1.0 / float(weight)
        lam = float(lam)
    for d in range(degree + 1):
        if d:
            value = value * d / (lam + d - 1)
        out[d] = value
    return out


def gram_diagonal(space: WeightedSpaceDesc) -> np.ndarray:
    """
    Gram diagonal of the monomial basis, blocks concatenated.

    Entry (j, d) is (1/mu_j) d! / (lambda+2j)_d; exact when all parameters are rational.
    """
    return np.concatenate([
        scalar_gram(space.block_lambda(j), space.degree, space.mu[j], exact=space.exact)
        for j in range(space.n)
    ])


def kernel_mixed_derivative(s: float, a: int, b: int, z: complex, w: complex) -> complex:
    """
    d^a/dz^a d^b/d(conj w)^b of (1 - z conj(w))^(-s).

    Closed form (s)_b sum_i C(a,i) b!/(b-i)! (s+b)_(a-i) z^(b-i) conj(w)^(a-i)
    (1 - z conj(w))^-(s+a+b-i).
    """
    u = np.conj(w)
    base = 1 - z * u
    total = 0j
    for i in range(min(a, b) + 1):
        total += (math.comb(a, i) * math.factorial(b) / math.factorial(b - i)
                  * pochhammer(s + b, a - i) * z ** (b - i) * u ** (a - i)
                  * base ** (-(s + a + b - i)))
    return pochhammer(s, b) * total


def matrix_kernel_B(lam: Scalar, mu: Sequence[Scalar], z: complex, w: complex) -> np.ndarray:
    """
    The n x n kernel B^(lambda, mu)(z, w).

    Entry (l, p) is sum_j C(l,j) C(p,j) mu_j / ((lambda+2j)_(l-j) (lambda+2j)_(p-j))
    times d^(l-j)/dz d^(p-j)/d(conj w) of (1 - z conj(w))^-(lambda+2j).
    """
    n = len(mu)
    lam = float(lam)
    out = np.zeros((n, n), dtype=complex)
    for l in range(n):
        for p in range(n):
            for j in range(min(l, p) + 1):
                s = lam + 2 * j
                coefficient = (math.comb(l, j) * math.comb(p, j) * float(mu[j])
                               / (pochhammer(s, l - j) * pochhammer(s, p - j)))
                out[l, p] += coefficient * kernel_mixed_derivative(s, l - j, p - j, z, w)
    return out


def kernel_coefficient(lam: Scalar, mu: Sequence[Scalar], l: int, p: int, x: int, y: int) -> Scalar:
    """
    Coefficient of z^x conj(w)^y in entry (l, p) of B^(lambda, mu).

    Exact for rational parameters; zero unless x + l = y + p.
    """
    if x < 0 or y < 0 or x + l != y + p:
        return 0
    total = 0
    for j in range(min(l, p) + 1):
        if mu[j] == 0:
            continue
        s = lam + 2 * j
        m = x + l - j
        numerator = math.comb(l, j) * math.comb(p, j) * mu[j] * pochhammer(s, m) * math.factorial(m)
        denominator = (pochhammer(s, l - j) * pochhammer(s, p - j)
                       * math.factorial(x) * math.factorial(y))
        if is_rational(numerator) and is_rational(denominator):
            total += Fraction(numerator) / Fraction(denominator)
        else:
            total += numerator / denominator
    return total


def god_identity_mismatches(
        lam: Scalar,
        mu: Sequence[Scalar],
        mu_doubleprime: Sequence[Scalar],
        degree: int,
        limit: int = 1,
) -> List[Tuple[int, int, int, int]]:
    """Entries (l, p, x, y) where (1 - z conj w) B^(lam, mu) and B^(lam-1, mu'') differ."""
    n = len(mu)
    mismatches = []
    for l in range(n):
        for p in range(n):
            for x in range(degree + 1):
                y = x + l - p
                if y < 0 or x + y > degree:
                    continue
                lhs = (kernel_coefficient(lam, mu, l, p, x, y)
                       - kernel_coefficient(lam, mu, l, p, x - 1, y - 1))
                rhs = kernel_coefficient(lam - 1, mu_doubleprime, l, p, x, y)
                if lhs != rhs:
                    mismatches.append((l, p, x, y))
                    if len(mismatches) >= limit:
                        return mismatches
    return mismatches


def check_god_identity(lam: Scalar, mu: Sequence[Scalar], degree: int) -> bool:
    """
    Exact comparison of (1 - z conj w) B^(lambda, mu) with B^(lambda-1, mu'').

    Power series in (z, conj w) are compared coefficient by coefficient up to
    the given total degree. A mismatch is logged with its position.
    """
    from .blockops import defect_parameters

    if not lam > 1:
        raise ValueError("check_god_identity needs lambda > 1")
    _, mu_doubleprime, _ = defect_parameters(lam, mu)
    mismatches = god_identity_mismatches(lam, mu, mu_doubleprime, degree)
    if mismatches:
        l, p, x, y = mismatches[0]
        logger.warning(f"Kernel recursion fails at entry ({l}, {p}), coefficient z^{x} w^{y}")
        return False
    return True


def gram_from_kernel(space: WeightedSpaceDesc) -> np.ndarray:
    """
    Gram diagonal recovered from the kernel expansion.

    Block j alone has kernel mu_j (1 - z conj w)^-(lambda+2j), the (j, j)
    entry of B^(lambda, mu_j e_j); the reciprocal of its z^d conj(w)^d
    coefficient is the squared norm of z^d.
    """
    blocks = []
    for j in range(space.n):
        weights = [0] * space.n
        weights[j] = space.mu[j]
        row = [1 / kernel_coefficient(space.lam, weights, j, j, d, d) for d in range(space.degree + 1)]
        blocks.append(np.array(row, dtype=object if space.exact else float))
    return np.concatenate(blocks)


def circle_grid(radius: float, count: int) -> List[complex]:
    return [radius * np.exp(2j * np.pi * k / count) for k in range(count)]


def default_positivity_grid() -> List[complex]:
    """The origin and 12 points on each of the circles of radius 0.3 and 0.6."""
    return [0j] + circle_grid(0.3, 12) + circle_grid(0.6, 12)


def kernel_gram_matrix(lam: Scalar, mu: Sequence[Scalar], points: Sequence[complex]) -> np.ndarray:
    """The Hermitian block matrix (B(z_a, z_b))_(a, b)."""
    n = len(mu)
    size = n * len(points)
    gram = np.zeros((size, size), dtype=complex)
    for a, z in enumerate(points):
        for b, w in enumerate(points):
            gram[a * n:(a + 1) * n, b * n:(b + 1) * n] = matrix_kernel_B(lam, mu, z, w)
    return gram


def check_kernel_positivity(lam: Scalar, mu: Sequence[Scalar], points: Sequence[complex]) -> float:
    """Smallest eigenvalue of the sampled kernel Gram matrix."""
    gram = kernel_gram_matrix(lam, mu, points)
    gram = 0.5 * (gram + gram.conj().T)
    return float(eigvalsh(gram)[0])
