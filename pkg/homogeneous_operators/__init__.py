"""
Homogeneous Operators Verification Lab

A package for verifying, at finite truncation, the identities behind the
homogeneous contractions M^(lambda, mu) with respect to the Mobius group,
their characteristic functions and the product formula for them.
"""

from .config import (
    Backend,
    Basis,
    CheckStatus,
    CompanionSide,
    SuiteConfig,
    Tolerances,
    VerificationReport,
)
from .exceptions import (
    AlignmentError,
    ConfigurationError,
    ContractionError,
    ConvergenceError,
    DimensionMismatchError,
    HomogeneousOperatorError,
    NonGenericParametersError,
)
from .mobius import MobiusMap
from .runner import SuiteRunner, run_suite

__version__ = "0.1.0"
__all__ = [
    "run_suite",
    "SuiteRunner",
    "SuiteConfig",
    "Tolerances",
    "VerificationReport",
    "MobiusMap",
    "Backend",
    "Basis",
    "CheckStatus",
    "CompanionSide",
    "HomogeneousOperatorError",
    "ConfigurationError",
    "NonGenericParametersError",
    "ContractionError",
    "ConvergenceError",
    "DimensionMismatchError",
    "AlignmentError",
]
