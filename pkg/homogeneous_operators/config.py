"""
Configuration settings and constants for verification runs.

This module defines the enums, configuration dataclasses, report container
and scalar helpers used throughout the verification pipeline.
"""

import cmath
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from dotenv import load_dotenv

load_dotenv()

Scalar = Union[Fraction, float]

LOG_LEVEL = os.getenv('HOMOGENEOUS_LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('HOMOGENEOUS_LOG_FILE')
DEFAULT_WORKERS = int(os.getenv('HOMOGENEOUS_WORKERS', 4))
DEFAULT_TRUNCATION = int(os.getenv('HOMOGENEOUS_DEFAULT_TRUNCATION', 48))
DEFAULT_HARDY_TRUNCATION = int(os.getenv('HOMOGENEOUS_DEFAULT_HARDY_TRUNCATION', 24))

DEFAULT_Z_GRID: Tuple[complex, ...] = (
    0j,
    0.3 + 0j,
    0.5j,
    -0.4 + 0.2j,
    0.6 * cmath.exp(1j * math.pi / 3),
    -0.25 - 0.45j,
)


class Backend(Enum):
    """Arithmetic backend for block-operator constructions."""
    EXACT = "exact"
    FLOAT = "float"
    AUTO = "auto"


class Basis(Enum):
    """Coordinate convention of a block operator."""
    MONOMIAL = "monomial"
    ORTHONORMAL = "orthonormal"


class CheckStatus(Enum):
    """Outcome of a single verification check."""
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class CompanionSide(Enum):
    """Which companion representation identity to verify."""
    RIGHT = "right"
    LEFT = "left"


# Exact checks carry tolerance 0; everything else is a residual bound.
DEFAULT_TOLERANCES: Dict[str, float] = {
    'identities': 0.0,
    'series': 1e-12,
    'cocycle': 1e-12,
    'multiplier': 1e-12,
    'god': 0.0,
    'positivity': 1e-10,
    'defect': 0.0,
    'c-equation': 0.0,
    'contractivity': 1e-12,
    'projective-law': 1e-8,
    'companion': 1e-6,
    'master': 1e-6,
    'entrywise': 1e-8,
    'covariance': 1e-5,
    'duality': 1e-8,
    'dilation': 1e-8,
    'characteristic-operator': 1e-8,
    'sigma-hat': 1e-5,
    'lemma53': 1e-10,
    'filtration': 1e-10,
    'kernel-dimension': 1e-10,
    'jet': 1e-10,
    'theorem52': 1e-6,
}


def parse_scalar(value: Union[str, int, float, Fraction]) -> Scalar:
    """
    Parse a parameter into an exact rational when possible.

    Integers, ``Fraction`` objects and strings such as ``"5/2"`` or ``"0.25"``
    become ``Fraction``; float objects and strings ``Fraction`` rejects
    (``"nan"``, ``"inf"``) stay floats.

    Raises:
        ValueError: If the value is not a real number.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a real number: {value!r}")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, float):
        return value
    text = str(value).strip()
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def parse_complex(text: str) -> complex:
    """Parse a complex literal written as ``a+bi`` or ``a+bj``."""
    cleaned = str(text).strip().replace(' ', '').replace('i', 'j')
    return complex(cleaned)


def format_scalar(value) -> Union[str, float]:
    """Render rationals as ``"p/q"`` and leave floats alone."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, complex):
        return f"{value.real:+.6g}{value.imag:+.6g}i"
    return value


def is_rational(value) -> bool:
    """True for exact rational parameters."""
    return isinstance(value, (Fraction, int)) and not isinstance(value, bool)


@dataclass(frozen=True)
class Tolerances:
    """
    Residual tolerances per check.

    Attributes:
        overrides: Check id to tolerance, taking precedence over defaults.
        fallback: Tolerance used for checks absent from both tables and for
            exact checks that had to fall back to floating point.
    """
    overrides: Dict[str, float] = field(default_factory=dict)
    fallback: float = 1e-10

    def __post_init__(self):
        for check_id, value in self.overrides.items():
            if value < 0:
                raise ValueError(f"tolerance for {check_id} must be non-negative")

    def for_check(self, check_id: str, exact: bool = True) -> float:
        """Tolerance for a check; exact checks relax to ``fallback`` in floats."""
        if check_id in self.overrides:
            return self.overrides[check_id]
        value = DEFAULT_TOLERANCES.get(check_id, self.fallback)
        if value == 0.0 and not exact:
            return self.fallback
        return value


@dataclass(frozen=True)
class SuiteConfig:
    """
    Configuration for a verification suite run.

    Attributes:
        lam: The parameter lambda (``Fraction`` when rational).
        mu: Block weights mu_0..mu_{n-1}.
        truncation: Polynomial degree N kept per block.
        hardy_truncation: Degree N_H kept in the Hardy-space factors.
        interior: Column degree bound for representation checks
            (defaults to truncation // 3).
        z_grid: Sample points in the open unit disc.
        tolerances: Residual tolerances per check.
        backend: Arithmetic backend (exact, float or auto).
        checks: Check ids to run, in any order.
        seed: Seed for random Mobius map sampling.
        workers: Size of the worker pool.
        report_path: Optional JSON-lines report destination.
    """
    lam: Scalar = Fraction(5, 2)
    mu: Tuple[Scalar, ...] = (Fraction(1), Fraction(1))
    truncation: int = DEFAULT_TRUNCATION
    hardy_truncation: int = DEFAULT_HARDY_TRUNCATION
    interior: Optional[int] = None
    z_grid: Tuple[complex, ...] = DEFAULT_Z_GRID
    tolerances: Tolerances = field(default_factory=Tolerances)
    backend: Backend = Backend.AUTO
    checks: Tuple[str, ...] = ()
    seed: int = 12345
    workers: int = DEFAULT_WORKERS
    report_path: Optional[str] = None

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if len(self.mu) == 0:
            raise ValueError("mu must contain at least one weight")
        if self.truncation <= 0:
            raise ValueError("truncation must be positive")
        if self.hardy_truncation <= 0:
            raise ValueError("hardy_truncation must be positive")
        if self.interior is not None and not 0 <= self.interior <= self.truncation:
            raise ValueError("interior must lie between 0 and truncation")
        if any(abs(z) >= 1 for z in self.z_grid):
            raise ValueError("z_grid points must lie in the open unit disc")
        if self.workers <= 0:
            raise ValueError("workers must be positive")

    @property
    def n(self) -> int:
        """Number of blocks."""
        return len(self.mu)

    @property
    def effective_interior(self) -> int:
        return self.truncation // 3 if self.interior is None else self.interior

    @property
    def resolved_backend(self) -> Backend:
        """Auto selects exact iff every parameter is rational."""
        if self.backend != Backend.AUTO:
            return self.backend
        exact = is_rational(self.lam) and all(is_rational(m) for m in self.mu)
        return Backend.EXACT if exact else Backend.FLOAT

    def parameters(self) -> Dict[str, object]:
        """Parameter echo for reports."""
        return {
            'lambda': format_scalar(self.lam),
            'mu': [format_scalar(m) for m in self.mu],
            'N': self.truncation,
            'N_H': self.hardy_truncation,
            'interior': self.effective_interior,
            'backend': self.resolved_backend.value,
            'seed': self.seed,
        }


@dataclass
class VerificationReport:
    """
    Outcome of one verification check.

    Attributes:
        check_id: Registered check id (or "config" for configuration errors).
        status: pass, fail or skipped.
        parameters: Echo of the parameters the check ran with.
        residual: Measured residual; None for exact checks.
        exact: Whether the check was decided in exact arithmetic.
        tolerance: Residual bound the check was held to.
        elapsed_ms: Wall time of the check.
        notes: Free-form remarks (truncation raises, branch dependence, ...).
    """
    check_id: str
    status: CheckStatus = CheckStatus.SKIPPED
    parameters: Dict[str, object] = field(default_factory=dict)
    residual: Optional[float] = None
    exact: bool = False
    tolerance: float = 0.0
    elapsed_ms: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS


def status_for(residual: Optional[float], tolerance: float, exact_ok: Optional[bool] = None) -> CheckStatus:
    """
    pass iff the exact flag holds or the residual is within tolerance.

    A flag given together with a residual adds conditions; it never lets a
    residual above tolerance pass.
    """
    if exact_ok is not None:
        if residual is not None and exact_ok:
            return status_for(residual, tolerance)
        return CheckStatus.PASS if exact_ok else CheckStatus.FAIL
    if residual is None or not math.isfinite(residual):
        return CheckStatus.FAIL
    return CheckStatus.PASS if residual <= tolerance else CheckStatus.FAIL


def as_fractions(values: Sequence) -> Tuple[Scalar, ...]:
    """Parse a sequence of parameters, keeping rationals exact."""
    return tuple(parse_scalar(v) for v in values)
