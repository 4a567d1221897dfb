"""
Truncated discrete series matrices, the operator Mobius calculus and the
companion representation identities.

All matrices here are in orthonormal bases. A composition operator does not
preserve polynomial degree, so a truncated column is exact only up to a tail
that decays like |alpha|^N; checks that multiply such matrices either work on
columns whose products are finite sums or raise the truncation with
``required_truncation``.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag, solve
from scipy.special import gammaln

from .algebra import TruncatedSeries, series_compose_pow
from .blockops import BlockOperator, build_A, build_Bminus, build_Bplus, interior_indices, require_generic
from .config import CompanionSide, Scalar
from .exceptions import ConvergenceError
from .logging_config import get_logger
from .mobius import MobiusMap, invert, multiplier_m0, principal_sqrt_unimodular, star

logger = get_logger(__name__)

MAX_TRUNCATION = 2048


def log_gram(lam: float, degree: int) -> np.ndarray:
    """log(d! / (lam)_d) for d = 0..degree."""
    d = np.arange(degree + 1)
    return gammaln(d + 1) + gammaln(lam) - gammaln(lam + d)


@dataclass
class RepMatrix:
    """
    Truncated matrix of a representation operator in the orthonormal basis.

    Attributes:
        matrix: (N+1) x (N+1) complex matrix.
        lam: Representation parameter.
        mobius: The group element represented.
        interior: Columns of degree <= interior are trusted.
    """
    matrix: np.ndarray
    lam: float
    mobius: MobiusMap
    interior: int

    @property
    def degree(self) -> int:
        return self.matrix.shape[0] - 1

    def interior_unitarity_error(self) -> float:
        """Largest deviation of an interior column norm from 1."""
        norms = np.linalg.norm(self.matrix[:, : self.interior + 1], axis=0)
        return float(np.max(np.abs(norms - 1)))


def required_truncation(radius: float, order: int, tolerance: float = 1e-14) -> int:
    """
    Smallest N with C(N+order, order) radius^N <= tolerance.

    Bounds the Taylor tail of c(phi, z)^lam phi(z)^k for |alpha| = radius
    when ``order`` dominates lam + k.

    Raises:
        ConvergenceError: If no N up to the truncation cap suffices.
    """
    if radius <= 0:
        return max(order, 0)
    if radius >= 1:
        raise ConvergenceError("composition tails do not decay for |alpha| >= 1")
    log_tol = math.log(tolerance)
    log_radius = math.log(radius)
    for degree in range(max(order, 1), MAX_TRUNCATION + 1):
        log_binom = gammaln(degree + order + 1) - gammaln(order + 1) - gammaln(degree + 1)
        if log_binom + degree * log_radius <= log_tol:
            return degree
    raise ConvergenceError(f"radius {radius} with order {order} needs a truncation above {MAX_TRUNCATION}")


def effective_truncation(degree: int, radius: float, interior: int, lam: float, n: int = 1,
                         tolerance: float = 1e-14) -> int:
    """Raise ``degree`` to what the composition tails at ``radius`` require; logs raises."""
    order = interior + int(math.ceil(float(lam))) + 2 * n + 1
    needed = required_truncation(radius, order, tolerance)
    if needed > degree:
        logger.info(f"Raising truncation from {degree} to {needed} (|alpha|={radius:.3f}, interior={interior})")
        return needed
    return degree


def discrete_series_matrix(lam: Scalar, f: MobiusMap, degree: int, interior: Optional[int] = None) -> RepMatrix:
    """
    Truncated matrix of D+_lam(f) in the orthonormal basis of H^(lam).

    D+_lam(f) sends h to c(f^-1, .)^lam (h o f^-1), so column k holds the
    coefficients of c(f^-1, z)^lam f^-1(z)^k, rescaled by sqrt(g_r / g_k)
    with g_d = d! / (lam)_d.
    """
    lam = float(lam)
    g = invert(f)
    size = degree + 1
    monomial = np.zeros((size, size), dtype=complex)
    column = series_compose_pow(g, lam, 0, degree)
    step = TruncatedSeries.from_mobius(g, degree)
    for k in range(size):
        if k:
            column = column * step
        monomial[:, k] = column.coefficients
    half_log = 0.5 * log_gram(lam, degree)
    matrix = monomial * np.exp(half_log[:, None] - half_log[None, :])
    return RepMatrix(matrix, lam, f, degree // 3 if interior is None else interior)


def d1_minus_matrix(f: MobiusMap, degree: int, interior: Optional[int] = None) -> RepMatrix:
    """D1-(f) = m0(f, f^-1) D1+(f*)."""
    sign = multiplier_m0(f, invert(f))
    base = discrete_series_matrix(1, star(f), degree, interior)
    return RepMatrix(sign * base.matrix, 1.0, f, base.interior)


def block_discrete_series(lam: Scalar, n: int, f: MobiusMap, degree: int) -> np.ndarray:
    """(+)_i D+_(lam+2i)(f), i = 0..n-1."""
    return block_diag(*[discrete_series_matrix(float(lam) + 2 * i, f, degree).matrix for i in range(n)])


class ProjectiveLawResult(NamedTuple):
    """Extracted multiplier and fit residual of the projective law."""
    multiplier: complex
    residual: float
    truncation: int


def check_projective_law(lam: Scalar, f: MobiusMap, g: MobiusMap, degree: int, interior: int) -> ProjectiveLawResult:
    """
    Fit D(fg) = m D(f) D(g) on the interior block with a unimodular m.

    The product D(f) D(g) drops the tail of the columns of D(g), so the
    truncation is raised to what |alpha_g| requires.
    """
    if interior > degree // 3:
        raise ValueError("interior must be at most N/3")
    degree = effective_truncation(degree, abs(g.alpha), interior, float(lam))
    m_f = discrete_series_matrix(lam, f, degree).matrix
    m_g = discrete_series_matrix(lam, g, degree).matrix
    m_fg = discrete_series_matrix(lam, f @ g, degree).matrix
    block = slice(0, interior + 1)
    product = (m_f @ m_g)[block, block]
    target = m_fg[block, block]
    overlap = np.vdot(product, target)
    multiplier = overlap / abs(overlap)
    residual = float(np.max(np.abs(target - multiplier * product)))
    return ProjectiveLawResult(complex(multiplier), residual, degree)


class OperatorMobius(NamedTuple):
    c_of_T: BlockOperator
    phi_of_T: BlockOperator


def mobius_of_matrix(f: MobiusMap, matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    c(f, X) = s(beta) sqrt(1 - |alpha|^2) (I - conj(alpha) X)^-1 and
    f(X) = beta (X - alpha I)(I - conj(alpha) X)^-1, by linear solves.
    """
    matrix = np.asarray(matrix, dtype=complex)
    identity = np.eye(matrix.shape[0], dtype=complex)
    resolvent_base = identity - f.alpha.conjugate() * matrix
    scale = principal_sqrt_unimodular(f.beta) * math.sqrt(1 - abs(f.alpha) ** 2)
    # the two factors commute, so a left solve gives the right quotient too
    c_matrix = scale * solve(resolvent_base, identity)
    phi_matrix = f.beta * solve(resolvent_base, matrix - f.alpha * identity)
    return c_matrix, phi_matrix


def mobius_of_operator(f: MobiusMap, T: BlockOperator) -> OperatorMobius:
    """c(f, T) and f(T) for a block operator, keeping its descriptors."""
    T = T.to_float()
    c_matrix, phi_matrix = mobius_of_matrix(f, T.matrix)
    return OperatorMobius(
        BlockOperator(c_matrix, T.domain, T.codomain, T.basis),
        BlockOperator(phi_matrix, T.domain, T.codomain, T.basis),
    )


def companion_check(
        lam: Scalar,
        mu: Sequence[Scalar],
        f: MobiusMap,
        degree: int,
        interior: int,
        side: CompanionSide = CompanionSide.RIGHT,
) -> float:
    """
    Residual of a companion representation identity in orthonormal coordinates.

    Right: Sigma'(f) B+ = m0(f, f^-1) B+ Sigma(f) c(f, A)^-1.
    Left: Sigma''(f) (B-)* = m0(f, f^-1) (B-)* Sigma(f) (c(f, A)*)^-1.
    Sigma, Sigma', Sigma'' are the block sums of D+ at lambda+2i, lambda+2i+1
    and lambda+2i-1. c(f, A)^-1 is the polynomial (I - conj(alpha) A) / c-scale,
    so every entry compared on rows of degree <= N-n and interior columns is a
    finite sum.

    Raises:
        NonGenericParametersError: If (lambda, mu) is not generic.
    """
    if isinstance(side, str):
        side = CompanionSide(side.lower())
    require_generic(lam, mu)
    n = len(mu)
    if interior > degree - n:
        raise ValueError("interior must be at most N - n")
    a_op = build_A(lam, mu, degree, exact=False).to_orthonormal()
    a = a_op.matrix
    identity = np.eye(a.shape[0], dtype=complex)
    sigma = block_discrete_series(lam, n, f, degree)
    sign = multiplier_m0(f, invert(f))
    scale = principal_sqrt_unimodular(f.beta) * math.sqrt(1 - abs(f.alpha) ** 2)

    if side == CompanionSide.RIGHT:
        b_op = build_Bplus(lam, mu, None, degree, exact=False).to_orthonormal()
        b = b_op.matrix
        c_inverse = (identity - f.alpha.conjugate() * a) / scale
        lhs = block_discrete_series(float(lam) + 1, n, f, degree) @ b
        rhs = sign * b @ sigma @ c_inverse
        rows = interior_indices(b_op.codomain, degree - n)
        cols = interior_indices(b_op.domain, interior)
    else:
        b_op = build_Bminus(lam, mu, degree, exact=False).to_orthonormal()
        b_adj = b_op.matrix.conj().T
        c_star_inverse = (identity - f.alpha * a.conj().T) / np.conj(scale)
        lhs = block_discrete_series(float(lam) - 1, n, f, degree) @ b_adj
        rhs = sign * b_adj @ sigma @ c_star_inverse
        rows = interior_indices(b_op.domain, degree - n)
        cols = interior_indices(b_op.codomain, interior)

    difference = (lhs - rhs)[np.ix_(rows, cols)]
    return float(np.max(np.abs(difference)))
