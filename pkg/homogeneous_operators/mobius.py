"""
Disc automorphisms in (alpha, beta) normal form.

A map is stored as phi(z) = beta (z - alpha) / (1 - conj(alpha) z) with
|alpha| < 1 and |beta| = 1. The module also fixes the square-root branch
s(beta) = exp(i Arg(beta) / 2), Arg in (-pi, pi], and builds the cocycle
c(phi, z) and the multiplier m0 on top of it.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

ComplexLike = Union[complex, float, np.ndarray]

_BETA_DRIFT = 1e-8


def _canon(x: complex) -> complex:
    """Turn signed zeros into +0.0 so that Arg(-1) is pi, never -pi."""
    x = complex(x)
    return complex(x.real + 0.0, x.imag + 0.0)


def _conj(x: complex) -> complex:
    return _canon(complex(x).conjugate())


def principal_sqrt_unimodular(beta: complex) -> complex:
    """The branch s(beta) = exp(i Arg(beta) / 2)."""
    return cmath.exp(0.5j * cmath.phase(_canon(beta)))


def unimodular_power(beta: complex, lam: float) -> complex:
    """s(beta)^lam, taken factor-wise as exp(i lam Arg(beta) / 2)."""
    return cmath.exp(0.5j * float(lam) * cmath.phase(_canon(beta)))


@dataclass(frozen=True)
class MobiusMap:
    """
    Disc automorphism phi(z) = beta (z - alpha) / (1 - conj(alpha) z).

    Attributes:
        alpha: The zero of the map, strictly inside the unit disc.
        beta: Unimodular factor; renormalized to modulus one on construction.
    """
    alpha: complex = 0j
    beta: complex = 1 + 0j

    def __post_init__(self):
        alpha = _canon(self.alpha)
        beta = complex(self.beta)
        if not abs(alpha) < 1:
            raise ValueError("alpha must lie in the open unit disc")
        if abs(abs(beta) - 1) > _BETA_DRIFT:
            raise ValueError("beta must be unimodular")
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'beta', _canon(beta / abs(beta)))

    def __call__(self, z: ComplexLike) -> ComplexLike:
        return self.beta * (z - self.alpha) / (1 - self.alpha.conjugate() * z)

    def derivative(self, z: ComplexLike) -> ComplexLike:
        """phi'(z) = beta (1 - |alpha|^2) / (1 - conj(alpha) z)^2."""
        return self.beta * (1 - abs(self.alpha) ** 2) / (1 - self.alpha.conjugate() * z) ** 2

    @property
    def is_rotation(self) -> bool:
        """Membership in the stabilizer of the origin."""
        return self.alpha == 0

    @property
    def is_identity(self) -> bool:
        return self.alpha == 0 and self.beta == 1

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return compose(self, other)


IDENTITY = MobiusMap()


def rotation(beta: complex) -> MobiusMap:
    """The rotation z -> beta z."""
    return MobiusMap(0j, beta)


def compose(f: MobiusMap, g: MobiusMap) -> MobiusMap:
    """The map z -> f(g(z)) in normal form."""
    a1, b1 = f.alpha, f.beta
    a2, b2 = g.alpha, g.beta
    w = 1 + a1 * a2.conjugate() * b2.conjugate()
    alpha = (a2 + a1 * b2.conjugate()) / w
    beta = b1 * b2 * w / w.conjugate()
    return MobiusMap(alpha, beta)


def invert(f: MobiusMap) -> MobiusMap:
    """Two-sided inverse under compose."""
    return MobiusMap(-f.alpha * f.beta, _conj(f.beta))


def star(f: MobiusMap) -> MobiusMap:
    """The outer automorphism phi*(z) = conj(phi(conj(z)))."""
    return MobiusMap(_conj(f.alpha), _conj(f.beta))


def involution_at(z: complex) -> MobiusMap:
    """
    The involution phi_z(w) = (z - w) / (1 - conj(z) w) swapping 0 and z.

    Raises:
        ValueError: If |z| >= 1.
    """
    if not abs(z) < 1:
        raise ValueError(f"involution_at needs |z| < 1, got {z}")
    return MobiusMap(complex(z), -1 + 0j)


def cocycle_c(f: MobiusMap, z: ComplexLike) -> ComplexLike:
    """c(phi, z) = s(beta) sqrt(1 - |alpha|^2) / (1 - conj(alpha) z)."""
    return (principal_sqrt_unimodular(f.beta) * math.sqrt(1 - abs(f.alpha) ** 2)
            / (1 - f.alpha.conjugate() * z))


def cocycle_power(f: MobiusMap, z: ComplexLike, lam: float) -> ComplexLike:
    """
    c(phi, z)^lam for real lam, defined factor by factor.

    s(beta)^lam uses the fixed branch, (1 - |alpha|^2)^(lam/2) is the positive
    root and (1 - conj(alpha) z)^(-lam) uses the principal logarithm, which is
    analytic on the closed disc since Re(1 - conj(alpha) z) > 0 there.
    """
    lam = float(lam)
    radial = (1 - abs(f.alpha) ** 2) ** (lam / 2)
    return unimodular_power(f.beta, lam) * radial * np.exp(-lam * np.log(1 - f.alpha.conjugate() * z))


def multiplier_raw(f: MobiusMap, g: MobiusMap) -> complex:
    """
    The multiplier before rounding.

    s(conj(beta)) / (s(conj(beta_1)) s(conj(beta_2))) * w / |w| with
    w = 1 + alpha_1 conj(alpha_2) conj(beta_2) and beta the unimodular factor
    of the composite f o g.
    """
    fg = compose(f, g)
    w = 1 + f.alpha * g.alpha.conjugate() * g.beta.conjugate()
    ratio = principal_sqrt_unimodular(_conj(fg.beta)) / (
        principal_sqrt_unimodular(_conj(f.beta)) * principal_sqrt_unimodular(_conj(g.beta))
    )
    return ratio * w / abs(w)


def multiplier_m0(f: MobiusMap, g: MobiusMap) -> int:
    """The multiplier m0(f, g), a sign relative to the fixed branch s."""
    return 1 if multiplier_raw(f, g).real >= 0 else -1


def random_mobius(rng: np.random.Generator, max_alpha: float = 0.5) -> MobiusMap:
    """Sample alpha uniformly from the disc of radius max_alpha and beta from the circle."""
    radius = max_alpha * math.sqrt(rng.uniform())
    alpha = radius * cmath.exp(2j * math.pi * rng.uniform())
    beta = cmath.exp(2j * math.pi * rng.uniform())
    return MobiusMap(alpha, beta)
