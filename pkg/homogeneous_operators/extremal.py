"""
Homogeneous polynomials on the bidisc and the extremal operators A_(lambda, n).

Hom(p) is spanned by z^i w^(p-i) with the norm of H^2 in z and H^(lambda) in
w, so the monomial z^i w^(p-i) has squared norm (p-i)! / (lambda)_(p-i).
V_(k,lambda)(p) is the orthogonal complement of (z - w)^k Hom(p-k).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space, solve, solve_triangular, svdvals

from .algebra import pochhammer
from .blockops import build_A, build_Bminus, build_Bplus, defect_parameters
from .charfun import coincidence_align, derivative_adjoint_orthonormal, theta_scalar
from .config import Scalar, is_rational
from .logging_config import get_logger
from .mobius import involution_at
from .reps import discrete_series_matrix, effective_truncation
from .spaces import god_identity_mismatches

logger = get_logger(__name__)

KERNEL_THRESHOLD = 1e-8


@dataclass(frozen=True)
class BiHomPoly:
    """
    A homogeneous polynomial sum_i a_i z^i w^(p-i) of degree p.

    Attributes:
        coefficients: a_0..a_p, exact for rational input.
    """
    coefficients: Tuple[Scalar, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coefficients', tuple(self.coefficients))
        if not self.coefficients:
            raise ValueError("coefficients must not be empty")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def as_array(self) -> np.ndarray:
        return np.array([complex(a) for a in self.coefficients])

    def norm_squared(self, lam: Scalar) -> float:
        """sum |a_i|^2 (p-i)! / (lambda)_(p-i)."""
        weights = hom_weights(lam, self.degree)
        return float(np.sum(np.abs(self.as_array()) ** 2 * weights))

    def inner(self, other: "BiHomPoly", lam: Scalar) -> complex:
        if other.degree != self.degree:
            return 0j
        return complex(np.sum(self.as_array() * np.conj(other.as_array()) * hom_weights(lam, self.degree)))


def hom_weights(lam: Scalar, p: int) -> np.ndarray:
    """Squared norms of z^i w^(p-i), i = 0..p."""
    return np.array([math.factorial(p - i) / pochhammer(float(lam), p - i) for i in range(p + 1)])


def h_basis(lam: Scalar, j: int, p: int) -> BiHomPoly:
    """h_(j,p)(z, w) = sum_i C(i, j) C(p-i+lambda-1, p-i) z^i w^(p-i)."""
    if not 0 <= j <= p:
        raise ValueError("h_basis needs 0 <= j <= p")
    coefficients = []
    for i in range(p + 1):
        # C(p-i+lambda-1, p-i) = (lambda)_(p-i) / (p-i)!
        falling = pochhammer(lam, p - i)
        value = math.comb(i, j) * (Fraction(falling) if is_rational(lam) else falling) / math.factorial(p - i)
        coefficients.append(value)
    return BiHomPoly(tuple(coefficients))


def difference_power_span(k: int, p: int) -> np.ndarray:
    """Columns (z - w)^k z^i w^(p-k-i), i = 0..p-k, as coefficient vectors of Hom(p)."""
    if k > p:
        return np.zeros((p + 1, 0))
    power = np.array([math.comb(k, t) * (-1) ** (k - t) for t in range(k + 1)], dtype=float)
    columns = []
    for i in range(p - k + 1):
        column = np.zeros(p + 1)
        # (z - w)^k = sum_t C(k,t) z^t (-w)^(k-t)
        column[i:i + k + 1] = power
        columns.append(column)
    return np.array(columns).T


def filtration_basis(lam: Scalar, k: int, p: int) -> np.ndarray:
    """
    Orthonormal basis of V_(k,lambda)(p) in the orthonormal coordinates of Hom(p).

    Computed by brute force as the complement of (z - w)^k Hom(p-k).
    """
    scale = np.sqrt(hom_weights(lam, p))
    if k > p:
        return np.eye(p + 1)
    span = scale[:, None] * difference_power_span(k, p)
    return null_space(span.conj().T)


def _orthonormal_coordinates(lam: Scalar, polys: Sequence[BiHomPoly], p: int) -> np.ndarray:
    scale = np.sqrt(hom_weights(lam, p))
    if not polys:
        return np.zeros((p + 1, 0))
    return np.array([scale * f.as_array() for f in polys]).T


def _projection_residual(vectors: np.ndarray, basis: np.ndarray, scale: Optional[float] = None) -> float:
    """
    Largest norm of the part of a column outside span(basis).

    Relative to each column's own norm, or to ``scale`` when given. Images
    under an operator take its norm as scale, so kernel images count as zero.
    """
    if vectors.shape[1] == 0:
        return 0.0
    remainder = np.linalg.norm(vectors - basis @ (basis.conj().T @ vectors), axis=0)
    if scale is not None:
        return float(np.max(remainder)) / (scale if scale > 0 else 1.0)
    norms = np.linalg.norm(vectors, axis=0)
    norms[norms == 0] = 1.0
    return float(np.max(remainder / norms))


class HBasisSpanResult(NamedTuple):
    """Whether {h_(j,p) : j < k} is a basis of V_(k,lambda)(p)."""
    passed: bool
    projection_residual: float
    dimension: int
    condition_number: float


def check_lemma53(lam: Scalar, k: int, p: int, tolerance: float = 1e-10) -> HBasisSpanResult:
    """Compare the h-vectors j < k with the brute-force V_(k,lambda)(p)."""
    if not 0 <= k <= p + 1:
        raise ValueError("check_lemma53 needs 0 <= k <= p+1")
    basis = filtration_basis(lam, k, p)
    h = _orthonormal_coordinates(lam, [h_basis(lam, j, p) for j in range(k)], p)
    residual = _projection_residual(h, basis)
    if k:
        values = svdvals(h)
        condition = float(values[0] / values[-1]) if values[-1] > 0 else math.inf
    else:
        condition = 1.0
    passed = basis.shape[1] == k and residual <= tolerance and math.isfinite(condition)
    if not passed:
        logger.warning(f"h-basis check fails for lambda={lam}, k={k}, p={p}: residual {residual:.2e}")
    return HBasisSpanResult(passed, residual, basis.shape[1], condition)


def check_filtration(lam: Scalar, p: int) -> float:
    """Largest projection residual of V_(k) onto V_(k+1), k = 0..p."""
    worst = 0.0
    for k in range(p + 1):
        worst = max(worst, _projection_residual(filtration_basis(lam, k, p), filtration_basis(lam, k + 1, p)))
    return worst


def theta_star_action(lam: Scalar, f: BiHomPoly) -> BiHomPoly:
    """
    Theta*_lambda f = df/dw / sqrt(lambda (lambda-1))
                      - sqrt((lambda-1)/lambda) (f(z,w) - f(w,w)) / (z - w).

    The divided difference is exact polynomial division: the coefficient of
    z^t w^(p-1-t) is the tail sum of a_i over i > t.
    """
    lam_f = float(lam)
    if not lam_f > 1:
        raise ValueError("theta_star_action needs lambda > 1")
    p = f.degree
    if p == 0:
        return BiHomPoly((0.0,))
    a = f.coefficients
    derivative = [a[i] * (p - i) for i in range(p)]
    divided = [sum(a[t + 1:]) for t in range(p)]
    first = 1 / math.sqrt(lam_f * (lam_f - 1))
    second = math.sqrt((lam_f - 1) / lam_f)
    return BiHomPoly(tuple(first * complex(b) - second * complex(d) for b, d in zip(derivative, divided)))


def theta_star_matrix(lam: Scalar, p: int) -> np.ndarray:
    """
    Theta*_lambda from Hom(p) with H^(lambda-1) weights to Hom(p-1) with
    H^(lambda+1) weights, in orthonormal coordinates.
    """
    if p == 0:
        return np.zeros((0, 1))
    columns = []
    for i in range(p + 1):
        unit = [0] * (p + 1)
        unit[i] = 1
        columns.append(theta_star_action(lam, BiHomPoly(tuple(unit))).as_array())
    monomial = np.array(columns).T
    domain = np.sqrt(hom_weights(float(lam) - 1, p))
    codomain = np.sqrt(hom_weights(float(lam) + 1, p - 1))
    return codomain[:, None] * monomial / domain[None, :]


def theta_star_composite(lam: Scalar, n: int, p: int) -> np.ndarray:
    """Theta*_(lambda, n) = Theta*_(lambda+2n-2) ... Theta*_(lambda+2) Theta*_lambda on Hom(p)."""
    composite = np.eye(p + 1)
    for step in range(n):
        degree = p - step
        if degree < 0:
            return np.zeros((0, p + 1))
        composite = theta_star_matrix(float(lam) + 2 * step, degree) @ composite
    return composite


class SplittingResult(NamedTuple):
    """Residuals of Theta*_lambda mapping V into V and the complement into the complement."""
    into_subspace: float
    into_complement: float


def check_theta_splitting(lam: Scalar, n: int, p: int) -> SplittingResult:
    """Theta*_lambda sends V_(n,lambda-1)(p) into V_(n-1,lambda+1)(p-1) and V-perp into V-perp."""
    if p == 0:
        return SplittingResult(0.0, 0.0)
    lam_f = float(lam)
    matrix = theta_star_matrix(lam_f, p)
    source = filtration_basis(lam_f - 1, n, p)
    target = filtration_basis(lam_f + 1, n - 1, p - 1)
    source_perp = null_space(source.conj().T)
    target_perp = null_space(target.conj().T)
    scale = float(svdvals(matrix)[0])
    into = _projection_residual(matrix @ source, target, scale)
    perp = _projection_residual(matrix @ source_perp, target_perp, scale)
    return SplittingResult(into, perp)


class KernelDimensionResult(NamedTuple):
    """Kernel dimension of Theta*_(lambda, n) on Hom(p) and the mapping residual."""
    dimension: int
    expected: int
    mapping_residual: float

    @property
    def passed(self) -> bool:
        return self.dimension == self.expected


def kernel_dimension_check(lam: Scalar, n: int, p: int, threshold: float = KERNEL_THRESHOLD) -> KernelDimensionResult:
    """
    Kernel dimension of Theta*_(lambda, n) on Hom(p) by singular-value
    threshold; it equals dim V_(n,lambda-1)(p) = min(n, p+1).
    """
    if not float(lam) > 1:
        raise ValueError("kernel_dimension_check needs lambda > 1")
    if n < 1:
        raise ValueError("n must be positive")
    composite = theta_star_composite(lam, n, p)
    values = svdvals(composite) if composite.size else np.zeros(0)
    rank = int(np.sum(values > threshold))
    dimension = p + 1 - rank
    mapping = check_theta_splitting(lam, n, p).into_subspace
    return KernelDimensionResult(dimension, min(n, p + 1), mapping)


def extremal_mu(lam: Scalar, n: int) -> Tuple[Scalar, ...]:
    """The weights mu_k = k!^2 / (lambda-1)_(2k) of A_(lambda, n)."""
    if is_rational(lam):
        return tuple(Fraction(math.factorial(k) ** 2) / Fraction(pochhammer(Fraction(lam) - 1, 2 * k))
                     for k in range(n))
    return tuple(math.factorial(k) ** 2 / pochhammer(float(lam) - 1, 2 * k) for k in range(n))


def _rational(lam: Scalar) -> Fraction:
    return Fraction(lam)


def jet_coefficients(lam: Scalar, n: int, f: BiHomPoly) -> np.ndarray:
    """
    (Jf)_i = c_i x^(p-i) with c_i = (1/(lambda-1)_i) d^i f/dw^i on the diagonal.

    Components with i > p vanish.
    """
    p = f.degree
    a = f.as_array()
    out = np.zeros(n, dtype=complex)
    for i in range(min(n - 1, p) + 1):
        total = sum(a[k] * math.factorial(p - k) / math.factorial(p - k - i) for k in range(p - i + 1))
        out[i] = total / pochhammer(float(lam) - 1, i)
    return out


def jet_orthonormal_coordinates(lam: Scalar, mu: Sequence[Scalar], p: int, c: np.ndarray) -> np.ndarray:
    """
    Coordinates of the vector (c_l x^(p-l))_l of H^(lambda, mu) in an orthonormal basis.

    The space is the image of (+)_j H^(lambda+2j) under the triangular map
    with (l, j) entry sqrt(mu_j) C(l, j) / (lambda+2j)_(l-j) d^(l-j); the
    preimage d is found by forward substitution and weighted by
    sqrt((p-j)! / (lambda+2j)_(p-j)).
    """
    lam_f = float(lam)
    top = min(len(mu) - 1, p)
    gamma = np.zeros((top + 1, top + 1))
    for l in range(top + 1):
        for j in range(l + 1):
            gamma[l, j] = (math.sqrt(float(mu[j])) * math.comb(l, j) / pochhammer(lam_f + 2 * j, l - j)
                           * math.factorial(p - j) / math.factorial(p - l))
    d = solve_triangular(gamma, c[:top + 1], lower=True)
    weights = np.array([math.factorial(p - j) / pochhammer(lam_f + 2 * j, p - j) for j in range(top + 1)])
    out = np.zeros(len(mu), dtype=complex)
    out[:top + 1] = d * np.sqrt(weights)
    return out


class JetCheckResult(NamedTuple):
    """Kernel identity outcome and the isometry / intertwining residuals of the jet map."""
    kernel_identity: bool
    isometry: float
    intertwining: float


def jet_check(lam: Scalar, n: int, max_degree: int) -> JetCheckResult:
    """
    (a) (1 - z conj w) B^(lambda, mu) = B^(lambda-1, e_0) exactly for the extremal mu;
    (b) J is isometric from V_(n,lambda-1) into H^(lambda, mu) and J P_V(z f) = x Jf,
    for every degree p <= max_degree.
    """
    lam = _rational(lam)
    if not lam > 1:
        raise ValueError("jet_check needs lambda > 1")
    mu = extremal_mu(lam, n)
    e0 = (Fraction(1),) + (Fraction(0),) * (n - 1)
    identity_holds = (tuple(defect_parameters(lam, mu).mu_doubleprime) == e0
                      and not god_identity_mismatches(lam, mu, e0, max_degree))
    if not identity_holds:
        logger.warning(f"Kernel identity for the extremal weights fails at lambda={lam}, n={n}")

    isometry = 0.0
    intertwining = 0.0
    for p in range(max_degree + 1):
        k = min(n, p + 1)
        basis = [h_basis(lam - 1, j, p) for j in range(k)]
        hom = _orthonormal_coordinates(lam - 1, basis, p)
        images = np.array([jet_orthonormal_coordinates(lam, mu, p, jet_coefficients(lam, n, f))
                           for f in basis]).T
        gram_hom = hom.conj().T @ hom
        gram_jet = images.conj().T @ images
        isometry = max(isometry, float(np.max(np.abs(gram_jet - gram_hom)) / np.max(np.abs(gram_hom))))

        target = filtration_basis(lam - 1, n, p + 1)
        scale = np.sqrt(hom_weights(lam - 1, p + 1))
        for f in basis:
            shifted = np.concatenate([[0], f.as_array()])
            projected = target @ (target.conj().T @ (scale * shifted))
            projected_poly = BiHomPoly(tuple(projected / scale))
            lhs = jet_coefficients(lam, n, projected_poly)
            rhs = jet_coefficients(lam, n, f)
            # x (Jf)_i has the coefficient c_i on x^(p+1-i)
            intertwining = max(intertwining, float(np.max(np.abs(lhs - rhs))))
    return JetCheckResult(identity_holds, isometry, intertwining)


def theta_extremal(lam: Scalar, n: int, z: complex, degree: int, interior: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    theta_(lambda, n)(z) as the product of theta_(lambda+2k)(z), and in the
    closed form D+_(lambda-1)(phi_z)* (d^n)* D+_(lambda+2n-1)(phi_z) / sqrt((lambda-1)_(2n)).
    """
    lam_f = float(lam)
    product = theta_scalar(lam_f, z, degree, interior).matrix
    for k in range(1, n):
        product = product @ theta_scalar(lam_f + 2 * k, z, degree, interior).matrix
    phi = involution_at(z)
    left = discrete_series_matrix(lam_f - 1, phi, degree).matrix
    right = discrete_series_matrix(lam_f + 2 * n - 1, phi, degree).matrix
    closed = (left.conj().T @ derivative_adjoint_orthonormal(lam_f - 1, n, degree) @ right
              / math.sqrt(pochhammer(lam_f - 1, 2 * n)))
    return product, closed


class ExtremalProductResult(NamedTuple):
    """Agreement of the two product forms and the coincidence residual against the direct side."""
    forms_residual: float
    alignment_residual: float
    rank_deficient: bool
    truncation: int


def check_theorem52(lam: Scalar, n: int, z_grid: Sequence[complex], degree: int,
                    interior: int) -> ExtremalProductResult:
    """
    The characteristic function of A_(lambda, n) is the product of theta_(lambda+2k).

    Samples theta_(lambda, n)(z) B+ and (B-)* (I - z A*)^-1 (z I - A) on interior
    blocks are aligned by coincidence_align. The defect spaces are single
    blocks here, so B+ keeps only its last target block and B- its first source block.
    """
    lam = _rational(lam)
    if not lam > 1:
        raise ValueError("check_theorem52 needs lambda > 1")
    mu = extremal_mu(lam, n)
    radius = max((abs(z) for z in z_grid), default=0.0)
    degree = effective_truncation(degree, radius, interior, float(lam) + 2 * n, n)

    a = build_A(lam, mu, degree, exact=False).to_orthonormal()
    b_plus = build_Bplus(lam, mu, None, degree, exact=False).to_orthonormal().matrix
    b_minus = build_Bminus(lam, mu, degree, exact=False).to_orthonormal().matrix
    identity = np.eye(a.matrix.shape[0], dtype=complex)
    rows = np.arange(interior + 1)
    columns = np.array([j * (degree + 1) + d for j in range(n) for d in range(interior + 1)])

    forms = 0.0
    product_samples: List[np.ndarray] = []
    direct_samples: List[np.ndarray] = []
    for z in z_grid:
        product, closed = theta_extremal(lam, n, z, degree, interior)
        forms = max(forms, float(np.max(np.abs((product - closed)[np.ix_(rows, rows)]))))
        resolvent = solve(identity - z * a.matrix.conj().T, z * identity - a.matrix)
        product_samples.append((product @ b_plus)[np.ix_(rows, columns)])
        direct_samples.append((b_minus.conj().T @ resolvent)[np.ix_(rows, columns)])
    alignment = coincidence_align(product_samples, direct_samples)
    if alignment.rank_deficient:
        logger.info("Alignment for the extremal operator is not unique on the interior block")
    return ExtremalProductResult(forms, alignment.residual, alignment.rank_deficient, degree)
