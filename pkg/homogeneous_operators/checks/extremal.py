"""
Checks on the bidisc model of the extremal operators A_(lambda, n).

These depend on lambda and n only; the weights are the extremal ones
mu_k = k!^2 / (lambda-1)_(2k), whatever mu the suite was configured with.
"""

from ..config import VerificationReport, format_scalar
from ..exceptions import NonGenericParametersError
from ..extremal import (
    check_filtration,
    check_lemma53,
    check_theorem52,
    check_theta_splitting,
    extremal_mu,
    jet_check,
    kernel_dimension_check,
)
from .base import BaseCheck

MAX_HOM_DEGREE = 8
MAX_KERNEL_BLOCKS = 3
JET_MAX_DEGREE = 12
PRODUCT_GRID_RADIUS = 0.5
FORMS_TOLERANCE = 1e-8


def _require_lambda_above_one(lam) -> None:
    if not lam > 1:
        raise NonGenericParametersError("the extremal family needs lambda > 1")


class HBasisSpanCheck(BaseCheck):
    """h^lambda_(j,p), j < k, is a basis of V_(k,lambda)(p) for all k <= p+1 <= 9."""

    check_id = "lemma53"
    description = "h-basis of the filtration spaces"

    def run(self) -> VerificationReport:
        lam = self.config.lam
        worst = 0.0
        failures = []
        for p in range(MAX_HOM_DEGREE + 1):
            for k in range(p + 2):
                result = check_lemma53(lam, k, p)
                worst = max(worst, result.projection_residual)
                if not result.passed:
                    failures.append((k, p))
        notes = [f"failing (k, p): {failures[:5]}"] if failures else []
        return self._report(residual=worst, exact_ok=not failures, notes=notes)


class FiltrationCheck(BaseCheck):
    """V_(k,lambda)(p) is contained in V_(k+1,lambda)(p)."""

    check_id = "filtration"
    description = "Monotonicity of the filtration"

    def run(self) -> VerificationReport:
        lam = self.config.lam
        worst = max(check_filtration(lam, p) for p in range(MAX_HOM_DEGREE + 1))
        return self._report(residual=worst)


class KernelDimensionCheck(BaseCheck):
    """
    The kernel of Theta*_(lambda, n) on Hom(p) has dimension min(n, p+1), and
    Theta*_lambda respects the splitting V_(n,lambda-1) (+) its complement.
    """

    check_id = "kernel-dimension"
    description = "Kernel of the adjoint composite and its splitting"

    def run(self) -> VerificationReport:
        lam = self.config.lam
        _require_lambda_above_one(lam)
        worst = 0.0
        mismatched = []
        for n in range(1, MAX_KERNEL_BLOCKS + 1):
            for p in range(MAX_HOM_DEGREE + 1):
                result = kernel_dimension_check(lam, n, p)
                splitting = check_theta_splitting(lam, n, p)
                worst = max(worst, result.mapping_residual,
                            splitting.into_subspace, splitting.into_complement)
                if result.dimension != result.expected:
                    mismatched.append((n, p, result.dimension, result.expected))
        notes = [f"dimension mismatches (n, p, found, expected): {mismatched[:5]}"] if mismatched else []
        tolerance = self.config.tolerances.for_check(self.check_id, exact=False)
        return self._report(residual=worst, exact_ok=not mismatched and worst <= tolerance, notes=notes)


class JetCheck(BaseCheck):
    """The jet map is an isometric intertwiner onto the extremal model space."""

    check_id = "jet"
    description = "Jet map of the extremal family"

    def run(self) -> VerificationReport:
        config = self.config
        _require_lambda_above_one(config.lam)
        result = jet_check(config.lam, config.n, JET_MAX_DEGREE)
        mu = [format_scalar(m) for m in extremal_mu(config.lam, config.n)]
        notes = [
            f"extremal weights {mu}",
            f"kernel identity (1 - z conj w) B = B^(lambda-1, e0): {'pass' if result.kernel_identity else 'fail'}",
            f"isometry {result.isometry:.3e}, intertwining {result.intertwining:.3e}",
        ]
        tolerance = config.tolerances.for_check(self.check_id, exact=False)
        residual = max(result.isometry, result.intertwining)
        return self._report(residual=residual, exact_ok=result.kernel_identity and residual <= tolerance,
                            notes=notes)


class ExtremalProductCheck(BaseCheck):
    """theta_(lambda, n) is the product of the theta_(lambda+2k) and coincides with the direct form."""

    check_id = "theorem52"
    description = "Product formula for the extremal operators"

    def run(self) -> VerificationReport:
        config = self.config
        _require_lambda_above_one(config.lam)
        grid = [z for z in config.z_grid if abs(z) <= PRODUCT_GRID_RADIUS]
        if not grid:
            grid = [0j]
        worst_forms = 0.0
        worst_alignment = 0.0
        notes = []
        for n in sorted({1, config.n}):
            result = check_theorem52(config.lam, n, grid, config.truncation, config.effective_interior)
            worst_forms = max(worst_forms, result.forms_residual)
            worst_alignment = max(worst_alignment, result.alignment_residual)
            notes.append(f"n={n}: forms {result.forms_residual:.3e}, alignment {result.alignment_residual:.3e}"
                         f"{' (rank deficient)' if result.rank_deficient else ''}, N={result.truncation}")
        tolerance = config.tolerances.for_check(self.check_id, exact=False)
        passed = worst_forms <= FORMS_TOLERANCE and worst_alignment <= tolerance
        return self._report(residual=max(worst_forms, worst_alignment), exact_ok=passed, notes=notes)
