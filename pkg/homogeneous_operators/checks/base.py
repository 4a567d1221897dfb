"""Base class for verification checks."""

from abc import ABC, abstractmethod
from typing import Callable, Iterable, Optional

import numpy as np

from ..config import Backend, SuiteConfig, VerificationReport, status_for
from ..logging_config import get_logger

logger = get_logger(__name__)


class BaseCheck(ABC):
    """
    Abstract base class for verification checks.

    Every check registers under ``check_id`` and implements ``run``, which
    returns one VerificationReport. Timing and exception handling belong to
    the runner.
    """

    check_id: str = ""
    description: str = ""

    def __init__(self, config: SuiteConfig):
        """
        Initialize a check with a suite configuration.

        Args:
            config: Parameters, truncations, grid and tolerances of the run.
        """
        self.config = config
        self._callback: Optional[Callable] = None

    def set_callback(self, callback: Callable) -> None:
        """
        Set a callback function for progress updates.

        Args:
            callback: Function called with progress messages.
        """
        self._callback = callback

    @abstractmethod
    def run(self) -> VerificationReport:
        """
        Perform the verification.

        Returns:
            VerificationReport with the measured residual and status.
        """
        pass

    @property
    def exact(self) -> bool:
        return self.config.resolved_backend == Backend.EXACT

    def rng(self) -> np.random.Generator:
        """A fresh generator, so reruns with the same seed draw the same maps."""
        return np.random.default_rng(self.config.seed)

    def _report(
            self,
            residual: Optional[float] = None,
            exact_ok: Optional[bool] = None,
            exact: bool = False,
            notes: Iterable[str] = (),
    ) -> VerificationReport:
        """Build the report, holding ``residual`` to the configured tolerance."""
        tolerance = self.config.tolerances.for_check(self.check_id, exact)
        return VerificationReport(
            check_id=self.check_id,
            status=status_for(residual, tolerance, exact_ok),
            parameters=self.config.parameters(),
            residual=residual,
            exact=exact,
            tolerance=tolerance,
            notes=list(notes),
        )

    def _log_progress(self, message: str) -> None:
        """Log progress message, using callback if available."""
        if self._callback:
            self._callback(message)
        else:
            logger.debug(f"[{self.check_id}] {message}")
