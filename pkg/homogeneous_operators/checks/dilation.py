"""Checks on the unitary dilation, the characteristic operator and the dilated representation."""

from ..blockops import weighted_shift
from ..config import VerificationReport
from ..dilation import build_dilation, check_characteristic_operator, check_dilation, check_sigma_hat
from ..exceptions import NonGenericParametersError
from ..mobius import involution_at, rotation
from .base import BaseCheck

POWER_BOUND = 6
ISOMETRY_TOLERANCE = 1e-10
CHARACTERISTIC_SCALE = 0.5
SIGMA_HAT_MAX_DEGREE = 24
SIGMA_HAT_MAX_HARDY_DEGREE = 16


class DilationCheck(BaseCheck):
    """
    The dilation of the weighted shift M^(lambda) is isometric on interior
    vectors, compresses to powers of the shift and transforms blockwise under
    f in Mob.
    """

    check_id = "dilation"
    description = "Unitary dilation of the weighted shift"

    def run(self) -> VerificationReport:
        config = self.config
        if config.lam < 1:
            raise NonGenericParametersError("the weighted shift is a contraction only for lambda >= 1")
        shift = weighted_shift(config.lam, config.truncation, exact=False)
        blocks = build_dilation(shift, config.hardy_truncation)
        worst_mobius = 0.0
        isometry = compression = 0.0
        for f in (involution_at(0.3), rotation(1j)):
            residuals = check_dilation(blocks, POWER_BOUND, f)
            isometry, compression = residuals.isometry, residuals.power_compression
            worst_mobius = max(worst_mobius, residuals.mobius_blocks)
        tolerance = config.tolerances.for_check(self.check_id, exact=False)
        passed = isometry <= ISOMETRY_TOLERANCE and compression <= ISOMETRY_TOLERANCE and worst_mobius <= tolerance
        notes = [
            f"isometry {isometry:.3e}",
            f"power compression (K={POWER_BOUND}) {compression:.3e}",
            f"Mobius blocks {worst_mobius:.3e}",
        ]
        return self._report(residual=max(isometry, compression, worst_mobius), exact_ok=passed, notes=notes)


class CharacteristicOperatorCheck(BaseCheck):
    """Coefficients of theta read off the dilation match the direct formula."""

    check_id = "characteristic-operator"
    description = "Characteristic operator of the scaled weighted shift"

    def run(self) -> VerificationReport:
        config = self.config
        shift = weighted_shift(config.lam, config.truncation, exact=False).to_orthonormal().matrix
        result = check_characteristic_operator(CHARACTERISTIC_SCALE * shift, config.hardy_truncation)
        notes = [f"orthogonality of the star wandering pieces {result.orthogonality_residual:.3e}",
                 f"coefficients compared up to z^{result.order}"]
        residual = max(result.coefficient_residual, result.orthogonality_residual)
        return self._report(residual=residual, notes=notes)


class SigmaHatCheck(BaseCheck):
    """W sigma_hat(f) = sigma_hat(f) f(W) for the dilation of M^(lambda, mu), at small sizes."""

    check_id = "sigma-hat"
    description = "Dilated representation intertwines the dilation"

    def run(self) -> VerificationReport:
        config = self.config
        degree = min(config.truncation, SIGMA_HAT_MAX_DEGREE)
        hardy_degree = min(config.hardy_truncation, SIGMA_HAT_MAX_HARDY_DEGREE)
        worst = 0.0
        notes = [f"N={degree}, N_H={hardy_degree}"]
        for f in (rotation(1j), involution_at(0.3)):
            residual = check_sigma_hat(config.lam, config.mu, f, degree, hardy_degree)
            notes.append(f"alpha={f.alpha:.3f}, beta={f.beta:.3f}: {residual:.3e}")
            worst = max(worst, residual)
        return self._report(residual=worst, notes=notes)
