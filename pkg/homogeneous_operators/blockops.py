"""
Block operators on (+)_j H^(lambda+2j): the multiplication operator A, the
inclusions B+ and B-, the middle operator C, defect parameters and the exact
operator identities relating them.

Builders work in weighted monomial coordinates: block j is H^(lambda+2j)
with squared norms divided by mu_j, so every block entry is rational in
(lambda, mu) and the square roots of the weights only appear when an
operator is moved to an orthonormal basis.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import svdvals

from .algebra import exact_zeros, pochhammer
from .config import Basis, Scalar, is_rational
from .exceptions import DimensionMismatchError, NonGenericParametersError
from .logging_config import get_logger
from .spaces import WeightedSpaceDesc, gram_diagonal, scalar_gram

logger = get_logger(__name__)


def _zeros(shape, exact: bool) -> np.ndarray:
    return exact_zeros(shape) if exact else np.zeros(shape, dtype=complex)


def _coerce(value, exact: bool):
    if exact:
        return Fraction(value)
    return float(value) if not isinstance(value, complex) else value


def _ratio(numerator, denominator, exact: bool):
    if exact:
        return Fraction(numerator) / Fraction(denominator)
    return float(numerator) / float(denominator)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product; object (exact) operands use a sparsity-aware loop."""
    if a.dtype != object and b.dtype != object:
        return a @ b
    if a.dtype != object or b.dtype != object:
        return a.astype(complex) @ b.astype(complex)
    out = exact_zeros((a.shape[0], b.shape[1]))
    rows_b = []
    for k in range(b.shape[0]):
        nonzero = np.nonzero(b[k] != 0)[0]
        rows_b.append([(j, b[k, j]) for j in nonzero])
    for i in range(a.shape[0]):
        for k in np.nonzero(a[i] != 0)[0]:
            aik = a[i, k]
            for j, bkj in rows_b[k]:
                out[i, j] += aik * bkj
    return out


@dataclass
class BlockOperator:
    """
    A truncated operator between weighted block spaces.

    Attributes:
        matrix: Full matrix; block (i, j) occupies rows of codomain block i
            and columns of domain block j.
        domain: Descriptor of the source space.
        codomain: Descriptor of the target space.
        basis: Monomial basis with Gram weights, or orthonormal basis.
    """
    matrix: np.ndarray
    domain: WeightedSpaceDesc
    codomain: WeightedSpaceDesc
    basis: Basis = Basis.MONOMIAL

    def __post_init__(self):
        expected = (self.codomain.dimension, self.domain.dimension)
        if self.matrix.shape != expected:
            raise DimensionMismatchError(f"matrix shape {self.matrix.shape} != {expected}")

    @property
    def exact(self) -> bool:
        return self.matrix.dtype == object

    def block(self, i: int, j: int) -> np.ndarray:
        rows = self.codomain.block_size
        cols = self.domain.block_size
        return self.matrix[i * rows:(i + 1) * rows, j * cols:(j + 1) * cols]

    def _check_compatible(self, other: "BlockOperator") -> None:
        if self.basis != other.basis:
            raise DimensionMismatchError("operands use different bases")

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        self._check_compatible(other)
        if self.domain.dimension != other.codomain.dimension:
            raise DimensionMismatchError("inner dimensions differ")
        return BlockOperator(matmul(self.matrix, other.matrix), other.domain, self.codomain, self.basis)

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        self._check_compatible(other)
        a, b = self.matrix, other.matrix
        if (a.dtype == object) != (b.dtype == object):
            a, b = a.astype(complex), b.astype(complex)
        return BlockOperator(a + b, self.domain, self.codomain, self.basis)

    def __neg__(self) -> "BlockOperator":
        return BlockOperator(-self.matrix, self.domain, self.codomain, self.basis)

    def __sub__(self, other: "BlockOperator") -> "BlockOperator":
        return self + (-other)

    def __mul__(self, scalar) -> "BlockOperator":
        return BlockOperator(self.matrix * scalar, self.domain, self.codomain, self.basis)

    __rmul__ = __mul__

    def adjoint(self) -> "BlockOperator":
        return weighted_adjoint(self)

    def to_float(self) -> "BlockOperator":
        return BlockOperator(np.asarray(self.matrix, dtype=complex), self.domain, self.codomain, self.basis)

    def to_orthonormal(self) -> "BlockOperator":
        """sqrt(G_cod) X sqrt(G_dom)^-1, always in floating point."""
        if self.basis == Basis.ORTHONORMAL:
            return self.to_float()
        g_dom = np.sqrt(np.asarray(gram_diagonal(self.domain), dtype=float))
        g_cod = np.sqrt(np.asarray(gram_diagonal(self.codomain), dtype=float))
        matrix = g_cod[:, None] * np.asarray(self.matrix, dtype=complex) / g_dom[None, :]
        return BlockOperator(matrix, self.domain, self.codomain, Basis.ORTHONORMAL)


def identity_operator(space: WeightedSpaceDesc, exact: Optional[bool] = None,
                      basis: Basis = Basis.MONOMIAL) -> BlockOperator:
    exact = space.exact if exact is None else exact
    matrix = _zeros((space.dimension, space.dimension), exact)
    for i in range(space.dimension):
        matrix[i, i] = Fraction(1) if exact else 1.0
    return BlockOperator(matrix, space, space, basis)


def weighted_adjoint(op: BlockOperator) -> BlockOperator:
    """
    Adjoint with respect to the Gram inner products: G_dom^-1 X^H G_cod.

    In the orthonormal basis this is the conjugate transpose.
    """
    if op.basis == Basis.ORTHONORMAL:
        return BlockOperator(op.matrix.conj().T, op.codomain, op.domain, op.basis)
    g_dom = gram_diagonal(op.domain)
    g_cod = gram_diagonal(op.codomain)
    if not op.exact:
        g_dom = np.asarray(g_dom, dtype=float)
        g_cod = np.asarray(g_cod, dtype=float)
    matrix = np.conj(op.matrix).T * g_cod[None, :] / g_dom[:, None]
    return BlockOperator(matrix, op.codomain, op.domain, op.basis)


def _shift_matrix(degree: int, exact: bool) -> np.ndarray:
    matrix = _zeros((degree + 1, degree + 1), exact)
    for d in range(degree):
        matrix[d + 1, d] = Fraction(1) if exact else 1.0
    return matrix


def _derivative_matrix(k: int, degree: int, exact: bool) -> np.ndarray:
    """Monomial matrix of d^k/dz^k: z^d -> d!/(d-k)! z^(d-k)."""
    matrix = _zeros((degree + 1, degree + 1), exact)
    for d in range(k, degree + 1):
        value = math.factorial(d) // math.factorial(d - k)
        matrix[d - k, d] = Fraction(value) if exact else float(value)
    return matrix


def _derivative_adjoint_matrix(lam_from: Scalar, k: int, degree: int, exact: bool) -> np.ndarray:
    """
    Monomial matrix of the adjoint of d^k: H^(lam_from) -> H^(lam_from+2k).

    z^e -> (g_to[e] / g_from[e+k]) (e+k)!/e! z^(e+k), unweighted Grams.
    """
    g_from = scalar_gram(lam_from, degree, exact=exact)
    g_to = scalar_gram(lam_from + 2 * k, degree, exact=exact)
    matrix = _zeros((degree + 1, degree + 1), exact)
    for e in range(degree + 1 - k):
        falling = math.factorial(e + k) // math.factorial(e)
        matrix[e + k, e] = g_to[e] / g_from[e + k] * falling
    return matrix


def weighted_shift(lam: Scalar, degree: int, exact: Optional[bool] = None) -> BlockOperator:
    """Multiplication by z on H^(lambda) truncated to degree N (one block)."""
    space = WeightedSpaceDesc(lam, (Fraction(1) if is_rational(lam) else 1.0,), degree)
    exact = space.exact if exact is None else exact
    return BlockOperator(_shift_matrix(degree, exact), space, space)


def derivative_block(lam_from: Scalar, k: int, degree: int, weight: Scalar = 1,
                     exact: Optional[bool] = None) -> BlockOperator:
    """d^k/dz^k from H^(lam_from) to H^(lam_from+2k), both scaled by ``weight``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    domain = WeightedSpaceDesc(lam_from, (weight,), degree)
    codomain = WeightedSpaceDesc(lam_from + 2 * k, (weight,), degree)
    exact = domain.exact if exact is None else exact
    return BlockOperator(_derivative_matrix(k, degree, exact), domain, codomain)


class DefectParameters(NamedTuple):
    """Parameters of the defect spaces; mu_prime entries are inf where 1/mu'_k = 0."""
    mu_prime: Tuple[Scalar, ...]
    mu_doubleprime: Tuple[Scalar, ...]
    generic: bool


def mu_prime_inverse(lam: Scalar, mu: Sequence[Scalar]) -> List[Scalar]:
    """1/mu'_k = ((lam+2k-1)/(lam+2k))/mu_k - ((k+1)/(lam+2k))^2/mu_(k+1); last term absent for k = n-1."""
    exact = is_rational(lam) and all(is_rational(m) for m in mu)
    n = len(mu)
    out = []
    for k in range(n):
        value = _ratio(lam + 2 * k - 1, (lam + 2 * k) * mu[k], exact)
        if k + 1 < n:
            value -= _ratio((k + 1) ** 2, (lam + 2 * k) ** 2 * mu[k + 1], exact)
        out.append(value)
    return out


def mu_doubleprime(lam: Scalar, mu: Sequence[Scalar]) -> List[Scalar]:
    """mu''_0 = mu_0, mu''_(k+1) = mu_(k+1) - (k+1)^2 mu_k / ((lam+2k-1)(lam+2k))."""
    exact = is_rational(lam) and all(is_rational(m) for m in mu)
    out = [_coerce(mu[0], exact)]
    for k in range(len(mu) - 1):
        out.append(_coerce(mu[k + 1], exact)
                   - _ratio((k + 1) ** 2 * mu[k], (lam + 2 * k - 1) * (lam + 2 * k), exact))
    return out


def defect_parameters(lam: Scalar, mu: Sequence[Scalar]) -> DefectParameters:
    """
    The parameters mu' and mu'' of the defect spaces and the genericity flag.

    Generic means lam > 1 and every mu'_k, mu''_k strictly positive and finite.
    Non-generic inputs still return their values.
    """
    inverse = mu_prime_inverse(lam, mu)
    doubleprime = mu_doubleprime(lam, mu)
    mu_prime = tuple(math.inf if v == 0 else 1 / v for v in inverse)
    generic = lam > 1 and all(v > 0 for v in inverse) and all(v > 0 for v in doubleprime)
    if not generic:
        logger.debug(f"Parameters lambda={lam}, mu={tuple(mu)} are not generic")
    return DefectParameters(mu_prime, tuple(doubleprime), generic)


def require_generic(lam: Scalar, mu: Sequence[Scalar]) -> DefectParameters:
    """
    Raises:
        NonGenericParametersError: If (lam, mu) is not generic.
    """
    params = defect_parameters(lam, mu)
    if not params.generic:
        raise NonGenericParametersError(
            f"lambda={lam}, mu={tuple(mu)} is not generic "
            f"(mu'={params.mu_prime}, mu''={params.mu_doubleprime})"
        )
    return params


def is_contractive(lam: Scalar, mu: Sequence[Scalar]) -> bool:
    """
    lam >= 1 and mu_(k+1)/mu_k >= (k+1)^2 / ((lam+2k-1)(lam+2k)) for every k.

    For lam > 1 the ratio condition is mu'' >= 0; at lam = 1 the k = 0
    threshold is infinite, so only the single-block shift qualifies.
    """
    if lam < 1:
        return False
    if lam == 1:
        return len(mu) == 1
    return all(v >= 0 for v in mu_doubleprime(lam, mu))


def _resolve_exact(exact: Optional[bool], *spaces: WeightedSpaceDesc) -> bool:
    if exact is None:
        return all(space.exact for space in spaces)
    return exact and all(space.exact for space in spaces)


def build_A(lam: Scalar, mu: Sequence[Scalar], degree: int, exact: Optional[bool] = None) -> BlockOperator:
    """
    The multiplication operator in weighted coordinates.

    Block (i, i) is M^(lambda+2i); block (i, j), i > j, is
    -(j+1)_(i-j) / (lambda+2j)_(2i-2j-1) d^(i-j-1); blocks above the diagonal vanish.
    """
    space = WeightedSpaceDesc(lam, mu, degree)
    exact = _resolve_exact(exact, space)
    size = degree + 1
    matrix = _zeros((space.dimension, space.dimension), exact)
    for i in range(space.n):
        matrix[i * size:(i + 1) * size, i * size:(i + 1) * size] = _shift_matrix(degree, exact)
        for j in range(i):
            coefficient = -_ratio(pochhammer(j + 1, i - j), pochhammer(lam + 2 * j, 2 * i - 2 * j - 1), exact)
            matrix[i * size:(i + 1) * size, j * size:(j + 1) * size] = (
                coefficient * _derivative_matrix(i - j - 1, degree, exact)
            )
    return BlockOperator(matrix, space, space)


def _leading_zero_count(values: Sequence[Scalar]) -> int:
    count = 0
    while count < len(values) and values[count] == 0:
        count += 1
    return count


def build_Bplus(
        lam: Scalar,
        mu: Sequence[Scalar],
        mu_target: Optional[Sequence[Scalar]] = None,
        degree: int = 0,
        exact: Optional[bool] = None,
) -> BlockOperator:
    """
    Inclusion of H_n^(lambda) with weights mu into H_n^(lambda+1) with weights mu_target.

    Block (i, j), i >= j, is (j+1)_(i-j) / (lambda+2j)_(2i-2j) d^(i-j). Target
    blocks of infinite weight (1/mu'_i = 0) form a prefix and are dropped, as
    are source blocks of zero weight, which form a suffix. The extremal
    parameters rely on both.

    Raises:
        NonGenericParametersError: On negative weights or degenerate blocks
            out of the prefix/suffix pattern.
    """
    if mu_target is None:
        mu_target = defect_parameters(lam, mu).mu_prime
    mu_target = tuple(mu_target)
    inverses = [0 if m == math.inf else 1 / m for m in mu_target]
    if any(v < 0 for v in inverses) or any(m < 0 for m in mu):
        raise NonGenericParametersError(f"negative weights in inclusion: mu={tuple(mu)}, target={mu_target}")
    first_row = _leading_zero_count(inverses)
    if any(v == 0 for v in inverses[first_row:]):
        raise NonGenericParametersError("infinite target weights must form a prefix")
    columns = len(mu) - _leading_zero_count(list(reversed(mu)))
    if any(m == 0 for m in mu[:columns]):
        raise NonGenericParametersError("zero source weights must form a suffix")
    if first_row == len(mu_target) or columns == 0:
        raise NonGenericParametersError("inclusion has no non-degenerate blocks")

    domain = WeightedSpaceDesc(lam, mu[:columns], degree)
    codomain = WeightedSpaceDesc(lam + 1 + 2 * first_row, mu_target[first_row:], degree)
    exact = _resolve_exact(exact, domain, codomain)
    size = degree + 1
    matrix = _zeros((codomain.dimension, domain.dimension), exact)
    for row, i in enumerate(range(first_row, len(mu_target))):
        for j in range(min(i + 1, columns)):
            coefficient = _ratio(pochhammer(j + 1, i - j), pochhammer(lam + 2 * j, 2 * i - 2 * j), exact)
            matrix[row * size:(row + 1) * size, j * size:(j + 1) * size] = (
                coefficient * _derivative_matrix(i - j, degree, exact)
            )
    return BlockOperator(matrix, domain, codomain)


def build_Bminus(lam: Scalar, mu: Sequence[Scalar], degree: int, exact: Optional[bool] = None) -> BlockOperator:
    """Inclusion of H_n^(lambda-1) with weights mu'' into H_n^(lambda) with weights mu."""
    if not lam > 1:
        raise NonGenericParametersError("the left inclusion needs lambda > 1")
    doubleprime = defect_parameters(lam, mu).mu_doubleprime
    return build_Bplus(lam - 1, doubleprime, mu, degree, exact)


def x_coefficients(lam: Scalar, mu: Sequence[Scalar]) -> np.ndarray:
    """
    The constants x_jk of the middle operator (floating point).

    x_(k+1,k) = (k+1) mu_k / (sqrt(mu'_k mu''_(k+1)) (lambda+2k-1)),
    x_jk = -sqrt(mu''_j) (j+1)_(k-j) / (sqrt(mu'_k) (lambda+2j-1)_(2k-2j+1)) for j <= k,
    and 0 for j > k+1.
    """
    params = require_generic(lam, mu)
    n = len(mu)
    lam_f = float(lam)
    mu_p = [float(v) for v in params.mu_prime]
    mu_pp = [float(v) for v in params.mu_doubleprime]
    x = np.zeros((n, n))
    for k in range(n):
        for j in range(k + 1):
            x[j, k] = (-math.sqrt(mu_pp[j]) * pochhammer(j + 1, k - j)
                       / (math.sqrt(mu_p[k]) * pochhammer(lam_f + 2 * j - 1, 2 * k - 2 * j + 1)))
        if k + 1 < n:
            x[k + 1, k] = (k + 1) * float(mu[k]) / (math.sqrt(mu_p[k] * mu_pp[k + 1]) * (lam_f + 2 * k - 1))
    return x


def build_C(lam: Scalar, mu: Sequence[Scalar], degree: int, exact: Optional[bool] = None) -> BlockOperator:
    """
    The middle operator from H_n^(lambda+1) (weights mu') to H_n^(lambda-1) (weights mu'').

    In weighted coordinates block (j, k) is sqrt(mu''_j / mu'_k) x_jk times the
    unweighted adjoint of d^(k-j+1), which keeps every entry rational.

    Raises:
        NonGenericParametersError: If (lambda, mu) is not generic.
    """
    params = require_generic(lam, mu)
    domain = WeightedSpaceDesc(lam + 1, params.mu_prime, degree)
    codomain = WeightedSpaceDesc(lam - 1, params.mu_doubleprime, degree)
    exact = _resolve_exact(exact, domain, codomain)
    n = len(mu)
    size = degree + 1
    mu_p = [_coerce(v, exact) for v in params.mu_prime]
    mu_pp = [_coerce(v, exact) for v in params.mu_doubleprime]
    matrix = _zeros((codomain.dimension, domain.dimension), exact)
    for k in range(n):
        for j in range(k + 1):
            coefficient = -mu_pp[j] * _ratio(pochhammer(j + 1, k - j),
                                             pochhammer(lam + 2 * j - 1, 2 * k - 2 * j + 1), exact) / mu_p[k]
            matrix[j * size:(j + 1) * size, k * size:(k + 1) * size] = (
                coefficient * _derivative_adjoint_matrix(lam + 2 * j - 1, k - j + 1, degree, exact)
            )
        if k + 1 < n:
            coefficient = (k + 1) * _coerce(mu[k], exact) / (mu_p[k] * _coerce(lam + 2 * k - 1, exact))
            block = _zeros((size, size), exact)
            for d in range(size):
                block[d, d] = coefficient
            matrix[(k + 1) * size:(k + 2) * size, k * size:(k + 1) * size] = block
    return BlockOperator(matrix, domain, codomain)


@dataclass
class IdentityCheck:
    """
    Outcome of an operator identity compared column by column.

    Attributes:
        passed: Whether the identity holds on the checked columns.
        residual: Largest absolute entry of the difference (0.0 when exact and equal).
        first_failure: (block, degree) of the first failing column, if any.
        exact: Whether the comparison was done in exact arithmetic.
    """
    passed: bool
    residual: float
    first_failure: Optional[Tuple[int, int]] = None
    exact: bool = True

    def __bool__(self) -> bool:
        return self.passed


def interior_indices(space: WeightedSpaceDesc, max_degree: int) -> np.ndarray:
    """Flat indices of monomials of degree <= max_degree in every block."""
    return np.array([j * space.block_size + d
                     for j in range(space.n) for d in range(min(max_degree, space.degree) + 1)], dtype=int)


def compare_columns(difference: BlockOperator, max_degree: int, tolerance: float = 1e-10) -> IdentityCheck:
    """Compare a difference of operators with zero on columns of degree <= max_degree."""
    columns = interior_indices(difference.domain, max_degree)
    sub = difference.matrix[:, columns]
    exact = difference.exact
    if exact:
        nonzero = [c for c in range(sub.shape[1]) if any(v != 0 for v in sub[:, c])]
        residual = float(max((abs(v) for v in sub.ravel()), default=0))
        failing = nonzero[0] if nonzero else None
        passed = failing is None
    else:
        magnitudes = np.abs(np.asarray(sub, dtype=complex))
        residual = float(magnitudes.max()) if magnitudes.size else 0.0
        column_max = magnitudes.max(axis=0) if magnitudes.size else np.zeros(0)
        bad = np.nonzero(column_max > tolerance)[0]
        failing = int(bad[0]) if bad.size else None
        passed = failing is None
    first = None
    if failing is not None:
        flat = int(columns[failing])
        first = divmod(flat, difference.domain.block_size)
        logger.warning(f"Identity fails first at block {first[0]}, degree {first[1]} (residual {residual:.3e})")
    return IdentityCheck(passed, residual, first, exact)


def check_defect_identity(lam: Scalar, mu: Sequence[Scalar], degree: int,
                          exact: Optional[bool] = None) -> IdentityCheck:
    """
    (B+)* B+ + A* A = I on columns of degree <= N-1.

    Raises:
        NonGenericParametersError: If (lambda, mu) is not generic.
    """
    require_generic(lam, mu)
    a = build_A(lam, mu, degree, exact)
    b = build_Bplus(lam, mu, None, degree, exact)
    lhs = b.adjoint() @ b + a.adjoint() @ a
    difference = lhs - identity_operator(a.domain, lhs.exact)
    return compare_columns(difference, degree - 1)


def check_C_equation(lam: Scalar, mu: Sequence[Scalar], degree: int,
                     exact: Optional[bool] = None) -> IdentityCheck:
    """
    B- C = -A (B+)* on columns of degree <= N-n-1.

    Raises:
        NonGenericParametersError: If (lambda, mu) is not generic.
    """
    require_generic(lam, mu)
    a = build_A(lam, mu, degree, exact)
    b_plus = build_Bplus(lam, mu, None, degree, exact)
    b_minus = build_Bminus(lam, mu, degree, exact)
    c = build_C(lam, mu, degree, exact)
    difference = b_minus @ c + a @ b_plus.adjoint()
    return compare_columns(difference, degree - len(mu) - 1)


def operator_norm(op: BlockOperator) -> float:
    """Largest singular value in the orthonormal basis."""
    matrix = op.to_orthonormal().matrix
    if matrix.size == 0:
        return 0.0
    return float(svdvals(matrix)[0])


def contractivity_scan(
        lam: Scalar,
        mu: Sequence[Scalar],
        start: int = 8,
        max_degree: int = 512,
        margin: float = 1e-3,
) -> Tuple[Optional[int], float]:
    """
    Double the truncation until the norm of A exceeds 1 + margin.

    Returns the first such degree (None if never) and the last norm seen.
    """
    degree = start
    norm = 0.0
    while degree <= max_degree:
        norm = operator_norm(build_A(lam, mu, degree, exact=False))
        logger.debug(f"contractivity scan: N={degree}, norm={norm:.6f}")
        if norm > 1 + margin:
            return degree, norm
        degree *= 2
    return None, norm
