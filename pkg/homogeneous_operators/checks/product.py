"""
Checks on characteristic functions: the product formula, its entrywise form,
covariance under the Mobius group and adjoint duality.
"""

from ..blockops import build_A
from ..charfun import (
    check_adjoint_duality,
    check_covariance,
    entrywise_discrepancy,
    master_check,
    master_check_at_origin,
    radial_probe,
)
from ..config import VerificationReport
from ..mobius import involution_at, rotation
from .base import BaseCheck

COVARIANCE_RADIUS = 0.4
PROBE_RADII = (0.3, 0.6, 0.9)


class MasterCheck(BaseCheck):
    """theta^(lambda, mu)(z) B+ = (B-)* (I - z A*)^-1 (z I - A) on the z-grid."""

    check_id = "master"
    description = "Product formula in inclusion coordinates"

    def run(self) -> VerificationReport:
        config = self.config
        worst = 0.0
        notes = []
        for z in config.z_grid:
            residual = master_check(config.lam, config.mu, z, config.truncation, config.effective_interior)
            self._log_progress(f"z={z:.3f}: {residual:.3e}")
            worst = max(worst, residual)

        origin = master_check_at_origin(config.lam, config.mu, config.truncation, self.exact)
        kind = "exact" if origin.exact else f"residual {origin.residual:.3e}"
        notes.append(f"origin identity C B+ = -(B-)* A: {'pass' if origin.passed else 'fail'} ({kind})")
        tolerance = config.tolerances.for_check(self.check_id, exact=False)
        return self._report(residual=worst, exact_ok=origin.passed and worst <= tolerance, notes=notes)


class EntrywiseCheck(BaseCheck):
    """Matrix form and y_jk product form of theta^(lambda, mu) agree on interior columns."""

    check_id = "entrywise"
    description = "Entrywise product form of the characteristic function"

    def run(self) -> VerificationReport:
        config = self.config
        worst = max(entrywise_discrepancy(config.lam, config.mu, z, config.truncation, config.effective_interior)
                    for z in config.z_grid)
        return self._report(residual=worst)


class CovarianceCheck(BaseCheck):
    """theta for f(A) coincides with theta for A composed with f^-1."""

    check_id = "covariance"
    description = "Mobius covariance of the characteristic function"

    def run(self) -> VerificationReport:
        config = self.config
        grid = [z for z in config.z_grid if abs(z) <= COVARIANCE_RADIUS]
        a = build_A(config.lam, config.mu, config.truncation, exact=False)
        notes = []
        worst = 0.0
        for f in (rotation(1j), involution_at(0.3)):
            residual = check_covariance(a, f, grid, config.truncation)
            notes.append(f"alpha={f.alpha:.3f}, beta={f.beta:.3f}: {residual:.3e}")
            worst = max(worst, residual)
        notes.append(f"{len(grid)} grid points with |z| <= {COVARIANCE_RADIUS}")
        return self._report(residual=worst, notes=notes)


class DualityCheck(BaseCheck):
    """theta for A* at conj(z), adjoined, coincides with theta for A at z."""

    check_id = "duality"
    description = "Adjoint duality of the characteristic function, with a radial probe"

    def run(self) -> VerificationReport:
        config = self.config
        a = build_A(config.lam, config.mu, config.truncation, exact=False)
        residual = check_adjoint_duality(a, config.z_grid)
        maxima = radial_probe(a, PROBE_RADII)
        monotone = all(high >= low - 1e-12 for low, high in zip(maxima, maxima[1:]))
        shown = ", ".join(f"{r}: {m:.6f}" for r, m in zip(PROBE_RADII, maxima))
        notes = [f"radial probe maxima {shown} ({'non-decreasing' if monotone else 'not monotone'})"]
        return self._report(residual=residual, notes=notes)
