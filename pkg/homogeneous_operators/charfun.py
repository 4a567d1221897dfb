"""
Characteristic functions: defect operators, direct evaluation, the explicit
product formulas and coincidence alignment.

Defect square roots are never inverted. The direct form works with
Theta_hat(z) = D_* (I - z T*)^-1 (z I - T), which equals theta(z) D, and
product-formula checks compare both sides after multiplying by the inclusion
B+ that plays the role of D in weighted coordinates.
"""

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import eigh, eigvalsh, solve, svd, svdvals

from .algebra import pochhammer
from .blockops import (
    BlockOperator,
    build_A,
    build_Bminus,
    build_Bplus,
    build_C,
    compare_columns,
    derivative_block,
    interior_indices,
    require_generic,
    x_coefficients,
)
from .config import Scalar
from .exceptions import AlignmentError, ContractionError
from .logging_config import get_logger
from .mobius import MobiusMap, invert, involution_at
from .reps import block_discrete_series, discrete_series_matrix, effective_truncation, mobius_of_matrix

logger = get_logger(__name__)

CLAMP_TOLERANCE = 1e-10
NORM_TOLERANCE = 1e-8

OperatorLike = Union[BlockOperator, np.ndarray]


class SampleForm(Enum):
    """How a characteristic function sample was produced."""
    DIRECT = "direct"
    EXPLICIT_PRODUCT = "explicit-product"


@dataclass
class CharFunSample:
    """
    One sample theta(z) in orthonormal coordinates.

    Attributes:
        z: Sample point in the open unit disc.
        matrix: The sampled matrix (rows: codomain, columns: domain).
        form: direct or explicit-product.
        interior: Rows and columns of degree <= interior (per block) are trusted.
        truncation: Degree the sample was computed at.
        block_count: Number of blocks in domain and codomain.
    """
    z: complex
    matrix: np.ndarray
    form: SampleForm
    interior: int
    truncation: int
    block_count: int = 1

    def interior_block(self) -> np.ndarray:
        size = self.truncation + 1
        index = np.array([j * size + d for j in range(self.block_count) for d in range(self.interior + 1)])
        return self.matrix[np.ix_(index, index)]


def _as_matrix(T: OperatorLike) -> np.ndarray:
    if isinstance(T, BlockOperator):
        return T.to_orthonormal().matrix
    return np.asarray(T, dtype=complex)


def defect_sqrt(T: OperatorLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    D = (I - T*T)^(1/2) and D_* = (I - TT*)^(1/2) by eigendecomposition.

    Eigenvalues in [-1e-10, 0) are clamped to zero.

    Raises:
        ContractionError: If the norm of T exceeds 1 + 1e-8.
    """
    matrix = _as_matrix(T)
    norm = float(svdvals(matrix)[0]) if matrix.size else 0.0
    if norm > 1 + NORM_TOLERANCE:
        raise ContractionError(f"operator norm {norm:.6f} exceeds 1")

    def root(gram: np.ndarray) -> np.ndarray:
        gram = 0.5 * (gram + gram.conj().T)
        values, vectors = eigh(gram)
        values = np.where((values < 0) & (values >= -CLAMP_TOLERANCE), 0.0, values)
        values = np.clip(values, 0.0, None)
        return (vectors * np.sqrt(values)) @ vectors.conj().T

    identity_in = np.eye(matrix.shape[1], dtype=complex)
    identity_out = np.eye(matrix.shape[0], dtype=complex)
    return root(identity_in - matrix.conj().T @ matrix), root(identity_out - matrix @ matrix.conj().T)


def theta_direct(T: OperatorLike, z: complex) -> np.ndarray:
    """Theta_hat(z) = D_* (I - z T*)^-1 (z I - T), i.e. theta(z) D."""
    matrix = _as_matrix(T)
    _, d_star = defect_sqrt(matrix)
    identity = np.eye(matrix.shape[0], dtype=complex)
    return d_star @ solve(identity - z * matrix.conj().T, z * identity - matrix)


def derivative_adjoint_orthonormal(lam_from: Scalar, k: int, degree: int) -> np.ndarray:
    """Adjoint of d^k: H^(lam_from) -> H^(lam_from+2k) in orthonormal bases."""
    return derivative_block(lam_from, k, degree, exact=False).to_orthonormal().matrix.conj().T


def theta_scalar(lam: Scalar, z: complex, degree: int, interior: Optional[int] = None) -> CharFunSample:
    """
    theta_lam(z) = D+_(lam-1)(phi_z)* d* D+_(lam+1)(phi_z) / sqrt(lam (lam-1)).

    Maps H^(lam+1) to H^(lam-1).
    """
    lam = float(lam)
    if not lam > 1:
        raise ValueError("theta_scalar needs lambda > 1")
    interior = degree // 3 if interior is None else interior
    phi = involution_at(z)
    left = discrete_series_matrix(lam - 1, phi, degree).matrix
    right = discrete_series_matrix(lam + 1, phi, degree).matrix
    middle = derivative_adjoint_orthonormal(lam - 1, 1, degree)
    matrix = left.conj().T @ middle @ right / math.sqrt(lam * (lam - 1))
    return CharFunSample(complex(z), matrix, SampleForm.EXPLICIT_PRODUCT, interior, degree)


def y_coefficients(lam: Scalar, mu: Sequence[Scalar]) -> np.ndarray:
    """y_jk = x_jk sqrt((lambda+2j-1)_(2k-2j+2)); y_(k+1,k) = x_(k+1,k)."""
    x = x_coefficients(lam, mu)
    n = len(mu)
    y = np.zeros_like(x)
    for k in range(n):
        for j in range(min(k + 2, n)):
            if j <= k:
                y[j, k] = x[j, k] * math.sqrt(pochhammer(float(lam) + 2 * j - 1, 2 * k - 2 * j + 2))
            else:
                y[j, k] = x[j, k]
    return y


class GenericTheta(NamedTuple):
    """Both forms of theta^(lambda, mu)(z)."""
    matrix_form: CharFunSample
    entrywise_form: CharFunSample


def theta_generic(lam: Scalar, mu: Sequence[Scalar], z: complex, degree: int,
                  interior: Optional[int] = None) -> GenericTheta:
    """
    theta^(lambda, mu)(z) from H_n^(lambda+1) to H_n^(lambda-1), in two forms.

    Matrix form: ((+) D+_(lam+2j-1)(phi_z))* C ((+) D+_(lam+2k+1)(phi_z)).
    Entrywise form: block (j, k) is y_jk theta_(lam+2j)(z) ... theta_(lam+2k)(z)
    for j <= k, x_(k+1,k) I for j = k+1 and zero below that.

    Raises:
        NonGenericParametersError: If (lambda, mu) is not generic.
    """
    require_generic(lam, mu)
    n = len(mu)
    interior = degree // 3 if interior is None else interior
    size = degree + 1
    phi = involution_at(z)
    left = block_discrete_series(float(lam) - 1, n, phi, degree)
    right = block_discrete_series(float(lam) + 1, n, phi, degree)
    c = build_C(lam, mu, degree, exact=False).to_orthonormal().matrix
    matrix_form = left.conj().T @ c @ right

    factors = [theta_scalar(float(lam) + 2 * l, z, degree, interior).matrix for l in range(n)]
    y = y_coefficients(lam, mu)
    entrywise = np.zeros((n * size, n * size), dtype=complex)
    for k in range(n):
        for j in range(min(k + 2, n)):
            if j == k + 1:
                block = y[j, k] * np.eye(size)
            else:
                block = factors[j]
                for l in range(j + 1, k + 1):
                    block = block @ factors[l]
                block = y[j, k] * block
            entrywise[j * size:(j + 1) * size, k * size:(k + 1) * size] = block

    z = complex(z)
    return GenericTheta(
        CharFunSample(z, matrix_form, SampleForm.EXPLICIT_PRODUCT, interior, degree, n),
        CharFunSample(z, entrywise, SampleForm.EXPLICIT_PRODUCT, interior, degree, n),
    )


def entrywise_discrepancy(lam: Scalar, mu: Sequence[Scalar], z: complex, degree: int, interior: int) -> float:
    """Interior discrepancy between the matrix and entrywise forms."""
    degree = effective_truncation(degree, abs(z), interior, float(lam) + 2 * len(mu), len(mu))
    forms = theta_generic(lam, mu, z, degree, interior)
    return float(np.max(np.abs(forms.matrix_form.interior_block() - forms.entrywise_form.interior_block())))


class MasterSides(NamedTuple):
    """Both sides of theta(z) B+ = (B-)* (I - z A*)^-1 (z I - A), interior block."""
    product_side: np.ndarray
    direct_side: np.ndarray
    truncation: int


def master_sides(lam: Scalar, mu: Sequence[Scalar], z: complex, degree: int, interior: int) -> MasterSides:
    """
    Interior blocks of the two sides of the inverse-free product formula.

    Rows are degrees <= interior of H_n^(lambda-1), columns degrees <= interior
    of H_n^(lambda). The truncation is raised to what |z| requires.
    """
    require_generic(lam, mu)
    n = len(mu)
    degree = effective_truncation(degree, abs(z), interior, float(lam) + 2 * n, n)
    theta = theta_generic(lam, mu, z, degree, interior).matrix_form.matrix
    a = build_A(lam, mu, degree, exact=False).to_orthonormal()
    b_plus = build_Bplus(lam, mu, None, degree, exact=False).to_orthonormal().matrix
    b_minus = build_Bminus(lam, mu, degree, exact=False).to_orthonormal().matrix
    identity = np.eye(a.matrix.shape[0], dtype=complex)
    resolvent = solve(identity - z * a.matrix.conj().T, z * identity - a.matrix)
    product_side = theta @ b_plus
    direct_side = b_minus.conj().T @ resolvent
    rows = interior_indices(a.domain, interior)
    cols = rows
    return MasterSides(product_side[np.ix_(rows, cols)], direct_side[np.ix_(rows, cols)], degree)


def master_check(lam: Scalar, mu: Sequence[Scalar], z: complex, degree: int, interior: int) -> float:
    """
    Max-entry residual of theta^(lambda, mu)(z) B+ = (B-)* (I - z A*)^-1 (z I - A).

    Raises:
        NonGenericParametersError: If (lambda, mu) is not generic.
    """
    sides = master_sides(lam, mu, z, degree, interior)
    return float(np.max(np.abs(sides.product_side - sides.direct_side)))


def master_check_at_origin(lam: Scalar, mu: Sequence[Scalar], degree: int, exact: Optional[bool] = None):
    """
    The origin case C B+ = -(B-)* A, decided exactly in weighted coordinates.

    theta(0) equals C, so this is the product formula at z = 0; columns of
    degree <= N-n-1 are compared.

    Raises:
        NonGenericParametersError: If (lambda, mu) is not generic.
    """
    require_generic(lam, mu)
    a = build_A(lam, mu, degree, exact)
    b_plus = build_Bplus(lam, mu, None, degree, exact)
    b_minus = build_Bminus(lam, mu, degree, exact)
    c = build_C(lam, mu, degree, exact)
    difference = c @ b_plus + b_minus.adjoint() @ a
    return compare_columns(difference, degree - len(mu) - 1)


def defect_restricted_singular_values(T: np.ndarray, z: complex, squared: bool = False) -> np.ndarray:
    """
    Singular values of theta(z) on the defect space, descending.

    ||theta(z) D x||^2 = x* Theta_hat* Theta_hat x and ||D x||^2 = x* (I - T*T) x,
    so they are square roots of generalized eigenvalues; D is never inverted.
    With ``squared`` the eigenvalues themselves are returned; near zero the
    square root turns rounding of size eps into errors of size sqrt(eps).

    Raises:
        ContractionError: If I - T*T is not positive definite.
    """
    T = np.asarray(T, dtype=complex)
    theta_hat = theta_direct(T, z)
    defect_gram = np.eye(T.shape[1]) - T.conj().T @ T
    defect_gram = 0.5 * (defect_gram + defect_gram.conj().T)
    if eigvalsh(defect_gram)[0] <= 0:
        raise ContractionError("singular values on the defect space need a strict contraction")
    numerator = theta_hat.conj().T @ theta_hat
    numerator = 0.5 * (numerator + numerator.conj().T)
    values = np.clip(eigh(numerator, defect_gram, eigvals_only=True), 0.0, None)[::-1]
    return values if squared else np.sqrt(values)


def _compression(T: OperatorLike, degree: Optional[int]) -> np.ndarray:
    """Orthonormal matrix of T, compressed to monomials of degree <= degree in every block."""
    matrix = _as_matrix(T)
    if degree is None:
        return matrix
    if degree < 0:
        raise ValueError("degree must be non-negative")
    if isinstance(T, BlockOperator):
        index = interior_indices(T.domain, degree)
    else:
        index = np.arange(min(degree + 1, matrix.shape[0]))
    return matrix[np.ix_(index, index)]


def check_covariance(T: OperatorLike, f: MobiusMap, z_grid: Iterable[complex],
                     degree: Optional[int] = None) -> float:
    """
    Coincidence of theta for f(T) with theta for T composed with f^-1.

    T is first compressed to degree <= ``degree`` in every block (a plain
    matrix counts as one block). Coincidence preserves singular values, so
    the squared lists for theta_(f(T))(z) and theta_T(f^-1(z)) are compared;
    the largest deviation over the grid is returned.
    """
    T = _compression(T, degree)
    _, phi_of_T = mobius_of_matrix(f, T)
    f_inverse = invert(f)
    worst = 0.0
    for z in z_grid:
        transformed = defect_restricted_singular_values(phi_of_T, z, squared=True)
        original = defect_restricted_singular_values(T, complex(f_inverse(z)), squared=True)
        worst = max(worst, float(np.max(np.abs(transformed - original))))
    return worst


def check_adjoint_duality(T: OperatorLike, z_grid: Iterable[complex]) -> float:
    """
    theta_(T*)(conj z)* coincides with theta_T(z); compares squared singular values.
    """
    T = _as_matrix(T)
    adjoint = T.conj().T
    worst = 0.0
    for z in z_grid:
        direct = defect_restricted_singular_values(T, z, squared=True)
        dual = defect_restricted_singular_values(adjoint, np.conj(z), squared=True)
        length = min(len(direct), len(dual))
        # nonzero singular values agree; the lists differ by zeros when dimensions differ
        worst = max(worst, float(np.max(np.abs(direct[:length] - dual[:length]))))
    return worst


def radial_probe(T: OperatorLike, radii: Sequence[float], samples: int = 16) -> List[float]:
    """
    Largest singular value of theta on circles of the given radii.

    By the maximum principle the true circle maxima are non-decreasing in the
    radius; this is a loose probe of growth toward the boundary, not a proof
    of innerness.
    """
    T = _as_matrix(T)
    maxima = []
    for radius in radii:
        points = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
        maxima.append(max(float(defect_restricted_singular_values(T, z)[0]) for z in points))
    return maxima


class CoincidenceResult(NamedTuple):
    """
    Unitaries with left @ samples1[z] ~ samples2[z] @ right.

    Attributes:
        left: Unitary on the codomain side.
        right: Unitary on the domain side.
        residual: max over the grid of ||left theta1(z) - theta2(z) right||_2.
        rank_deficient: Whether the base sample made the alignment non-unique.
    """
    left: np.ndarray
    right: np.ndarray
    residual: float
    rank_deficient: bool


def _polar_unitary(matrix: np.ndarray) -> np.ndarray:
    u, _, vh = svd(matrix)
    return u @ vh


def _alignment_residual(left, right, samples1, samples2) -> float:
    return max(float(np.linalg.norm(left @ a - b @ right, 2)) for a, b in zip(samples1, samples2))


def coincidence_align(
        samples1: Sequence[np.ndarray],
        samples2: Sequence[np.ndarray],
        base: int = 0,
        iterations: int = 60,
        rank_tolerance: float = 1e-8,
) -> CoincidenceResult:
    """
    Align two sample sets up to fixed unitaries on both sides.

    Alternating Procrustes: with the right factor fixed the left one is the
    polar factor of sum theta2 R theta1*, and vice versa. Two starts are
    tried, the identity and the polar alignment of the base sample, and the
    better result is kept.

    Raises:
        AlignmentError: If the sample sets have different lengths or shapes.
    """
    if len(samples1) != len(samples2) or not samples1:
        raise AlignmentError("sample sets must be non-empty and of equal length")
    samples1 = [np.asarray(s, dtype=complex) for s in samples1]
    samples2 = [np.asarray(s, dtype=complex) for s in samples2]
    if any(a.shape != b.shape for a, b in zip(samples1, samples2)):
        raise AlignmentError("samples must have equal shapes")
    rows, cols = samples1[0].shape

    u1, s1, vh1 = svd(samples1[base])
    u2, _, vh2 = svd(samples2[base])
    rank_deficient = bool(rows != cols or s1[-1] <= rank_tolerance * s1[0])
    if rank_deficient:
        logger.info("Base sample is rank deficient; alignment is not unique")

    starts = [
        (np.eye(rows, dtype=complex), np.eye(cols, dtype=complex)),
        (u2 @ u1.conj().T, vh2.conj().T @ vh1),
    ]
    best = None
    for left, right in starts:
        for _ in range(iterations):
            left = _polar_unitary(sum(b @ right @ a.conj().T for a, b in zip(samples1, samples2)))
            right = _polar_unitary(sum(b.conj().T @ left @ a for a, b in zip(samples1, samples2)))
        residual = _alignment_residual(left, right, samples1, samples2)
        if best is None or residual < best.residual:
            best = CoincidenceResult(left, right, residual, rank_deficient)
    return best


def export_samples_csv(samples: Sequence[CharFunSample], path: Union[str, Path]) -> Path:
    """Write samples as rows (re z, im z, row, col, re entry, im entry)."""
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["re_z", "im_z", "row", "col", "re", "im"])
        for sample in samples:
            rows, cols = sample.matrix.shape
            for r in range(rows):
                for c in range(cols):
                    entry = sample.matrix[r, c]
                    writer.writerow([sample.z.real, sample.z.imag, r, c, entry.real, entry.imag])
    logger.info(f"Exported {len(samples)} samples to {path}")
    return path
