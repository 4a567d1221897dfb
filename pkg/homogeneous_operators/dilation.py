"""
The minimal unitary dilation in 3 x 3 block form, its Mobius calculus, the
characteristic operator it defines and the dilated representation.

The dilation space is (D (x) H^2) (+) H (+) (D_* (x) H^2) with the Hardy
factors truncated at degree N_H. A vector x (x) z^k of a Hardy part sits at
index k * dim + a, so Hardy degree is the slow index.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy.linalg import block_diag, eigh, svdvals

from .algebra import cauchy_coefficients
from .blockops import BlockOperator, build_A, build_Bminus, build_Bplus, build_C, require_generic
from .charfun import defect_sqrt, theta_direct
from .config import Scalar
from .exceptions import ContractionError, ConvergenceError
from .logging_config import get_logger
from .mobius import MobiusMap, involution_at
from .reps import block_discrete_series, d1_minus_matrix, discrete_series_matrix, mobius_of_matrix
from .spaces import WeightedSpaceDesc

logger = get_logger(__name__)

RANK_TOLERANCE = 1e-12


def hardy_shift(hardy_degree: int) -> np.ndarray:
    """Truncated unilateral shift on H^2 of degree <= N_H."""
    return np.eye(hardy_degree + 1, k=-1, dtype=complex)


@dataclass
class DilationBlocks:
    """
    The nonzero blocks of the dilation

        [ I(x)S   iD   i C* i_*^* ]
        [   0     T    D_* i_*^*  ]
        [   0     0    I(x)S*     ]

    Attributes:
        base: T on H, shape M x M.
        defect_embed: D in coordinates of the defect space, r x M (the (1,2)
            block at Hardy degree 0).
        middle_adjoint: C* from the star defect space to the defect space, r x r_*.
        defect_star_map: D_* from star defect coordinates into H, M x r_*.
        hardy_degree: Truncation N_H of both Hardy factors.
        base_degrees: Polynomial degree of every coordinate of H.
        defect_degrees: Degree of every defect coordinate (zeros for eigenbases).
        defect_star_degrees: Same for the star defect space.
        defect_star_basis: Columns spanning the star defect space inside H,
            when it is realized there.
    """
    base: np.ndarray
    defect_embed: np.ndarray
    middle_adjoint: np.ndarray
    defect_star_map: np.ndarray
    hardy_degree: int
    base_degrees: np.ndarray
    defect_degrees: np.ndarray
    defect_star_degrees: np.ndarray
    defect_star_basis: Optional[np.ndarray] = None

    @property
    def defect_rank(self) -> int:
        return self.defect_embed.shape[0]

    @property
    def defect_star_rank(self) -> int:
        return self.defect_star_map.shape[1]

    @property
    def hardy_size(self) -> int:
        return self.hardy_degree + 1

    @property
    def slices(self):
        first = self.defect_rank * self.hardy_size
        middle = first + self.base.shape[0]
        last = middle + self.defect_star_rank * self.hardy_size
        return slice(0, first), slice(first, middle), slice(middle, last)

    @property
    def dimension(self) -> int:
        return self.slices[2].stop

    def matrix(self) -> np.ndarray:
        """The assembled dilation."""
        shift = hardy_shift(self.hardy_degree)
        r, r_star = self.defect_rank, self.defect_star_rank
        first, middle, last = self.slices
        out = np.zeros((self.dimension, self.dimension), dtype=complex)
        out[first, first] = np.kron(shift, np.eye(r))
        out[first.start:first.start + r, middle] = self.defect_embed
        out[first.start:first.start + r, last.start:last.start + r_star] = self.middle_adjoint
        out[middle, middle] = self.base
        out[middle, last.start:last.start + r_star] = self.defect_star_map
        out[last, last] = np.kron(shift.T, np.eye(r_star))
        return out

    def part_indices(self, part: int, hardy_bound: int, degree_bound: int) -> np.ndarray:
        """Coordinates of one part (0, 1, 2) with Hardy degree and base degree bounded."""
        region = self.slices[part]
        if part == 1:
            return region.start + np.nonzero(self.base_degrees <= degree_bound)[0]
        rank, degrees = ((self.defect_rank, self.defect_degrees) if part == 0
                         else (self.defect_star_rank, self.defect_star_degrees))
        allowed = np.nonzero(degrees <= degree_bound)[0]
        hardy = range(min(hardy_bound, self.hardy_degree) + 1)
        return np.array([region.start + k * rank + a for k in hardy for a in allowed], dtype=int)

    def interior_indices(self, hardy_bound: int, degree_bound: int) -> np.ndarray:
        """Coordinates of Hardy degree <= hardy_bound and base degree <= degree_bound."""
        return np.concatenate([self.part_indices(part, hardy_bound, degree_bound) for part in range(3)])


def _space_degrees(space: WeightedSpaceDesc) -> np.ndarray:
    return np.tile(np.arange(space.block_size), space.n)


def _range_basis(gram: np.ndarray, tolerance: float) -> np.ndarray:
    """Orthonormal basis of the range of a PSD matrix; the standard basis when it is invertible."""
    values, vectors = eigh(0.5 * (gram + gram.conj().T))
    keep = values > tolerance
    if keep.all():
        return np.eye(gram.shape[0], dtype=complex)
    return vectors[:, keep]


def build_dilation(T: Union[BlockOperator, np.ndarray], hardy_degree: int,
                   rank_tolerance: float = RANK_TOLERANCE) -> DilationBlocks:
    """
    Assemble the dilation blocks of a contraction.

    The defect spaces are the ranges of D and D_*, with the standard basis of
    H when the defect operator is invertible. C acts as -T from the defect
    space to the star defect space.

    Raises:
        ContractionError: If T is not a contraction.
    """
    if isinstance(T, BlockOperator):
        base_degrees = _space_degrees(T.domain)
        matrix = T.to_orthonormal().matrix
    else:
        matrix = np.asarray(T, dtype=complex)
        base_degrees = np.arange(matrix.shape[0])
    d, d_star = defect_sqrt(matrix)
    identity = np.eye(matrix.shape[0])
    basis = _range_basis(identity - matrix.conj().T @ matrix, rank_tolerance)
    basis_star = _range_basis(identity - matrix @ matrix.conj().T, rank_tolerance)
    logger.debug(f"Defect ranks {basis.shape[1]} and {basis_star.shape[1]} on dimension {matrix.shape[0]}")
    full = basis.shape[1] == matrix.shape[0]
    full_star = basis_star.shape[1] == matrix.shape[0]
    return DilationBlocks(
        base=matrix,
        defect_embed=basis.conj().T @ d,
        middle_adjoint=-basis.conj().T @ matrix.conj().T @ basis_star,
        defect_star_map=d_star @ basis_star,
        hardy_degree=hardy_degree,
        base_degrees=base_degrees,
        defect_degrees=base_degrees if full else np.zeros(basis.shape[1], dtype=int),
        defect_star_degrees=base_degrees if full_star else np.zeros(basis_star.shape[1], dtype=int),
        defect_star_basis=basis_star,
    )


def build_dilation_gamma(lam: Scalar, mu: Sequence[Scalar], degree: int, hardy_degree: int) -> DilationBlocks:
    """
    Dilation of M^(lambda, mu) with the defect spaces realized as H_n^(lambda+1)
    and H_n^(lambda-1): D becomes B+, D_* becomes (B-)* and C the middle operator.

    Raises:
        NonGenericParametersError: If (lambda, mu) is not generic.
    """
    require_generic(lam, mu)
    a = build_A(lam, mu, degree, exact=False).to_orthonormal()
    b_plus = build_Bplus(lam, mu, None, degree, exact=False).to_orthonormal()
    b_minus = build_Bminus(lam, mu, degree, exact=False).to_orthonormal()
    c = build_C(lam, mu, degree, exact=False).to_orthonormal()
    return DilationBlocks(
        base=a.matrix,
        defect_embed=b_plus.matrix,
        middle_adjoint=c.matrix.conj().T,
        defect_star_map=b_minus.matrix,
        hardy_degree=hardy_degree,
        base_degrees=_space_degrees(a.domain),
        defect_degrees=_space_degrees(b_plus.codomain),
        defect_star_degrees=_space_degrees(b_minus.domain),
    )


class DilationResiduals(NamedTuple):
    """Residuals of the dilation checks on interior vectors."""
    isometry: float
    power_compression: float
    mobius_blocks: float


def _max_abs(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def mobius_block_formulas(blocks: DilationBlocks, f: MobiusMap) -> dict:
    """
    The blocks of f(W) predicted from those of W.

    Diagonal blocks are I (x) f(S), f(T) and I (x) f(S*); the (1,2) block is
    (I (x) c(f, S)) i D c(f, T) and the (2,3) block c(f, T) D_* i_*^* (I (x) c(f, S*)).
    """
    shift = hardy_shift(blocks.hardy_degree)
    r, r_star = blocks.defect_rank, blocks.defect_star_rank
    c_shift, phi_shift = mobius_of_matrix(f, shift)
    c_coshift, phi_coshift = mobius_of_matrix(f, shift.T)
    c_base, phi_base = mobius_of_matrix(f, blocks.base)
    return {
        (0, 0): np.kron(phi_shift, np.eye(r)),
        (0, 1): np.kron(c_shift[:, :1], np.eye(r)) @ blocks.defect_embed @ c_base,
        (1, 1): phi_base,
        (1, 2): c_base @ blocks.defect_star_map @ np.kron(c_coshift[:1, :], np.eye(r_star)),
        (2, 2): np.kron(phi_coshift, np.eye(r_star)),
    }


def check_dilation(blocks: DilationBlocks, power_bound: int, f: Optional[MobiusMap] = None) -> DilationResiduals:
    """
    Isometry, power compression and Mobius block formulas on interior vectors.

    Interior vectors have Hardy degree <= N_H - K - 1 and base degree
    <= N - K - 1, with K the power bound.
    """
    f = involution_at(0.3) if f is None else f
    degree = int(blocks.base_degrees.max()) if blocks.base_degrees.size else 0
    hardy_bound = blocks.hardy_degree - power_bound - 1
    degree_bound = degree - power_bound - 1
    if hardy_bound < 0 or degree_bound < 0:
        raise ConvergenceError(f"power bound {power_bound} leaves no interior vectors")
    w = blocks.matrix()
    columns = blocks.interior_indices(hardy_bound, degree_bound)
    images = w[:, columns]
    isometry = _max_abs(images.conj().T @ images - np.eye(len(columns)))

    middle = blocks.slices[1]
    base_columns = blocks.part_indices(1, hardy_bound, degree_bound)
    local = base_columns - middle.start
    iterate = w[:, base_columns]
    power = blocks.base[:, local]
    compression = 0.0
    for k in range(1, power_bound + 1):
        compression = max(compression, _max_abs(iterate[middle] - power))
        iterate = w @ iterate
        power = blocks.base @ power

    _, phi_w = mobius_of_matrix(f, w)
    predicted = mobius_block_formulas(blocks, f)
    mobius_residual = 0.0
    for (row, col), expected in predicted.items():
        cols = blocks.part_indices(col, hardy_bound, degree_bound)
        actual = phi_w[blocks.slices[row], :][:, cols]
        mobius_residual = max(mobius_residual, _max_abs(actual - expected[:, cols - blocks.slices[col].start]))
    logger.debug(f"Dilation residuals: isometry={isometry:.2e}, compression={compression:.2e}, "
                 f"mobius={mobius_residual:.2e}")
    return DilationResiduals(isometry, compression, mobius_residual)


class CharacteristicOperatorResult(NamedTuple):
    """Deviation of the extracted coefficient stream and orthogonality of the star wandering spaces."""
    coefficient_residual: float
    orthogonality_residual: float
    order: int


def check_characteristic_operator(
        T: Union[BlockOperator, np.ndarray],
        hardy_degree: int,
        order: Optional[int] = None,
        tail_tolerance: float = 1e-6,
        radius: float = 0.5,
        samples: int = 64,
) -> CharacteristicOperatorResult:
    """
    Extract the Taylor coefficients of the characteristic function from the dilation.

    W^m (D_* (x) 1), m = 0..order, are the orthonormal pieces of the star
    wandering subspace; pairing them with W* (D x (x) 1) gives the m-th
    coefficient of theta(z) D, which is compared with the Cauchy coefficients
    of the direct formula.

    Raises:
        ContractionError: If T is not a strict contraction.
        ConvergenceError: If ||T||^N_H exceeds the tail tolerance or order >= N_H.
    """
    matrix = T.to_orthonormal().matrix if isinstance(T, BlockOperator) else np.asarray(T, dtype=complex)
    norm = float(svdvals(matrix)[0]) if matrix.size else 0.0
    if norm >= 1:
        raise ContractionError(f"the coefficient stream needs a strict contraction, norm is {norm:.6f}")
    if norm ** hardy_degree > tail_tolerance:
        raise ConvergenceError(f"tail ||T||^N_H = {norm ** hardy_degree:.2e} exceeds {tail_tolerance:.0e}")
    order = min(8, hardy_degree - 1) if order is None else order
    if order >= hardy_degree:
        raise ConvergenceError("order must stay below the Hardy truncation")

    blocks = build_dilation(matrix, hardy_degree)
    w = blocks.matrix()
    first, _, last = blocks.slices
    r, r_star = blocks.defect_rank, blocks.defect_star_rank

    embedded = np.zeros((blocks.dimension, matrix.shape[0]), dtype=complex)
    embedded[first.start:first.start + r] = blocks.defect_embed
    pulled_back = w.conj().T @ embedded

    wandering = np.zeros((blocks.dimension, r_star), dtype=complex)
    wandering[last.start:last.start + r_star] = np.eye(r_star)
    pieces = []
    for _ in range(order + 1):
        pieces.append(wandering)
        wandering = w @ wandering
    stacked = np.hstack(pieces)
    orthogonality = _max_abs(stacked.conj().T @ stacked - np.eye(stacked.shape[1]))

    expected = cauchy_coefficients(lambda points: np.stack([theta_direct(matrix, z) for z in points]),
                                   order, radius=radius, samples=samples)
    basis_star = blocks.defect_star_basis
    residual = 0.0
    for m, piece in enumerate(pieces):
        extracted = basis_star @ (piece.conj().T @ pulled_back)
        residual = max(residual, _max_abs(extracted - expected[m]))
    return CharacteristicOperatorResult(residual, orthogonality, order)


def dilated_representation(lam: Scalar, n: int, f: MobiusMap, degree: int, hardy_degree: int) -> np.ndarray:
    """
    (Sigma' (x) D1+(f)) (+) Sigma(f) (+) (Sigma'' (x) D1-(f)) in the coordinates of
    ``build_dilation_gamma``, where Sigma, Sigma', Sigma'' are the block sums
    of D+ at lambda+2i, lambda+2i+1 and lambda+2i-1.
    """
    lam = float(lam)
    part1 = np.kron(discrete_series_matrix(1, f, hardy_degree).matrix,
                    block_discrete_series(lam + 1, n, f, degree))
    middle = block_discrete_series(lam, n, f, degree)
    part3 = np.kron(d1_minus_matrix(f, hardy_degree).matrix,
                    block_discrete_series(lam - 1, n, f, degree))
    return block_diag(part1, middle, part3)


def check_sigma_hat(
        lam: Scalar,
        mu: Sequence[Scalar],
        f: MobiusMap,
        degree: int,
        hardy_degree: int,
        interior: Optional[int] = None,
        hardy_interior: Optional[int] = None,
) -> float:
    """
    Max-entry residual of W sigma_hat(f) = sigma_hat(f) f(W) on interior vectors.

    Interior defaults to N // 8 and N_H // 8.

    Raises:
        NonGenericParametersError: If (lambda, mu) is not generic.
    """
    interior = degree // 8 if interior is None else interior
    hardy_interior = hardy_degree // 8 if hardy_interior is None else hardy_interior
    blocks = build_dilation_gamma(lam, mu, degree, hardy_degree)
    w = blocks.matrix()
    _, phi_w = mobius_of_matrix(f, w)
    sigma = dilated_representation(lam, len(mu), f, degree, hardy_degree)
    columns = blocks.interior_indices(hardy_interior, interior)
    difference = w @ sigma[:, columns] - sigma @ phi_w[:, columns]
    return _max_abs(difference)
