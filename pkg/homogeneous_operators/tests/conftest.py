"""
Pytest fixtures for testing.
"""

import logging
from fractions import Fraction

import numpy as np
import pytest

from homogeneous_operators.blockops import weighted_shift
from homogeneous_operators.config import SuiteConfig


@pytest.fixture
def rng():
    """Seeded generator for random Mobius maps and vectors."""
    return np.random.default_rng(20240611)


@pytest.fixture
def generic_parameters():
    """lambda = 5/2 with two unit weights: generic and contractive."""
    return Fraction(5, 2), (Fraction(1), Fraction(1))


@pytest.fixture
def scaled_shift():
    """Half the weighted shift M^(2) at degree 12, a strict contraction."""
    return 0.5 * weighted_shift(Fraction(2), 12, exact=False).to_orthonormal().matrix


@pytest.fixture
def suite_config():
    """Factory for small suite configurations."""

    def make(**overrides):
        values = dict(
            lam=Fraction(2),
            mu=(Fraction(1),),
            truncation=12,
            hardy_truncation=12,
            workers=2,
        )
        values.update(overrides)
        return SuiteConfig(**values)

    return make


@pytest.fixture
def restore_logging():
    """Put the root logger back after a test calls setup_logging."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    for handler in root.handlers:
        if handler not in handlers:
            handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)
