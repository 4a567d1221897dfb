"""Custom exceptions for homogeneous operator verification."""


class HomogeneousOperatorError(Exception):
    """Base exception for homogeneous operator errors."""
    pass


class ConfigurationError(HomogeneousOperatorError):
    """Raised when a suite configuration is invalid."""
    pass


class NonGenericParametersError(HomogeneousOperatorError):
    """Raised when generic (lambda, mu) parameters are required but not given."""
    pass


class ContractionError(HomogeneousOperatorError):
    """Raised when an operator that must be a contraction is not."""
    pass


class ConvergenceError(HomogeneousOperatorError):
    """Raised when a truncation cannot reach the requested tolerance."""
    pass


class DimensionMismatchError(HomogeneousOperatorError):
    """Raised when block or sample shapes are incompatible."""
    pass


class AlignmentError(HomogeneousOperatorError):
    """Raised when two sample sets cannot be aligned."""
    pass
