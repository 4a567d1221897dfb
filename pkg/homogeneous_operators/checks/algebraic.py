"""
Checks on scalar identities, series, kernels and the exact block identities.
"""

from fractions import Fraction

import numpy as np

from ..algebra import (
    MAX_JAX_ORDER,
    cauchy_coefficients,
    identity1_sides,
    identity2_sides,
    identity_failures,
    jax_compose_pow,
    jax_taylor_coefficients,
    series_compose_pow,
)
from ..blockops import (
    build_A,
    check_C_equation,
    check_defect_identity,
    contractivity_scan,
    defect_parameters,
    is_contractive,
    operator_norm,
)
from ..config import VerificationReport, format_scalar, is_rational
from ..exceptions import NonGenericParametersError
from ..mobius import cocycle_power, random_mobius
from ..spaces import (
    check_kernel_positivity,
    circle_grid,
    default_positivity_grid,
    god_identity_mismatches,
)
from .base import BaseCheck

IDENTITY_MAX_L = 30
SERIES_DEGREE = 20
SERIES_MAPS = 8
GOD_DEGREE = 40
CONTRACTIVITY_DEGREE = 60
VIOLATION_MARGIN = 1e-3
NEGATIVE_PROBE_LAMBDA = Fraction(2)
NEGATIVE_PROBE_MU = (Fraction(1), Fraction(-1, 10))
NEGATIVE_PROBE_BOUND = -1e-6


def _exact_parameters(config):
    """The binary rationals the parameters stand for; exact values pass through."""
    return Fraction(config.lam), tuple(Fraction(m) for m in config.mu)


class IdentitiesCheck(BaseCheck):
    """Both Pochhammer identities for every 0 <= j <= l <= 30."""

    check_id = "identities"
    description = "Pochhammer identities 1 and 2, exhaustive in (j, l)"

    def run(self) -> VerificationReport:
        lam = self.config.lam
        if is_rational(lam):
            failures = identity_failures([lam], IDENTITY_MAX_L)
            notes = [f"first failure (identity, lambda, j, l) = {failures[0]}"] if failures else []
            return self._report(exact_ok=not failures, exact=True, notes=notes)

        worst = 0.0
        for l in range(IDENTITY_MAX_L + 1):
            for j in range(l + 1):
                sides = [identity2_sides(lam, j, l)]
                if j < l:
                    sides.append(identity1_sides(lam, j, l))
                for lhs, rhs in sides:
                    worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1.0))
        return self._report(residual=worst, notes=["floating lambda; relative residual"])


class SeriesCheck(BaseCheck):
    """series_compose_pow against the jax and Cauchy coefficient oracles."""

    check_id = "series"
    description = "Taylor coefficients of c(f, z)^lambda f(z)^k"

    def run(self) -> VerificationReport:
        lam = float(self.config.lam)
        rng = self.rng()
        worst = 0.0
        for index in range(SERIES_MAPS):
            f = random_mobius(rng)
            for k in range(3):
                series = series_compose_pow(f, lam, k, SERIES_DEGREE).coefficients
                autodiff = jax_taylor_coefficients(jax_compose_pow(f, lam, k), MAX_JAX_ORDER)
                worst = max(worst, float(np.max(np.abs(series[: MAX_JAX_ORDER + 1] - autodiff))))

                def values(points, f=f, k=k):
                    return cocycle_power(f, points, lam) * f(points) ** k

                fft = cauchy_coefficients(values, SERIES_DEGREE)
                worst = max(worst, float(np.max(np.abs(series - fft))))
            self._log_progress(f"map {index + 1}/{SERIES_MAPS}: residual so far {worst:.3e}")
        return self._report(residual=worst)


class GodIdentityCheck(BaseCheck):
    """(1 - z conj w) B^(lambda, mu) = B^(lambda-1, mu'') coefficient by coefficient."""

    check_id = "god"
    description = "Kernel recursion to total degree 40"

    def run(self) -> VerificationReport:
        lam, mu = _exact_parameters(self.config)
        if not lam > 1:
            raise NonGenericParametersError("the kernel recursion needs lambda > 1")
        _, mu_doubleprime, _ = defect_parameters(lam, mu)
        notes = [f"mu'' = {[format_scalar(v) for v in mu_doubleprime]}"]
        if not self.exact:
            notes.append("decided for the binary rationals of the floating parameters")
        mismatches = god_identity_mismatches(lam, mu, mu_doubleprime, GOD_DEGREE)
        if mismatches:
            l, p, x, y = mismatches[0]
            notes.append(f"first mismatch: entry ({l}, {p}), coefficient z^{x} conj(w)^{y}")
        return self._report(exact_ok=not mismatches, exact=True, notes=notes)


class PositivityCheck(BaseCheck):
    """
    Sampled Gram matrices of B^(lambda, mu) are positive semidefinite for
    non-negative parameters, and a negative weight produces a negative eigenvalue.
    """

    check_id = "positivity"
    description = "Kernel positivity on the default grid plus a negative-weight probe"

    def run(self) -> VerificationReport:
        config = self.config
        tolerance = config.tolerances.for_check(self.check_id, exact=False)
        probe = check_kernel_positivity(NEGATIVE_PROBE_LAMBDA, NEGATIVE_PROBE_MU, circle_grid(0.9, 24))
        notes = [f"negative-weight probe: min eigenvalue {probe:.3e}"]
        probe_ok = probe < NEGATIVE_PROBE_BOUND

        if config.lam >= 0 and all(m >= 0 for m in config.mu):
            smallest = check_kernel_positivity(config.lam, config.mu, default_positivity_grid())
            notes.append(f"min eigenvalue {smallest:.3e} on the default grid")
            residual = max(0.0, -smallest)
            return self._report(residual=residual, exact_ok=probe_ok and residual <= tolerance, notes=notes)

        smallest = check_kernel_positivity(config.lam, config.mu, circle_grid(0.9, 24))
        notes.append(f"negative parameters: min eigenvalue {smallest:.3e}")
        return self._report(residual=smallest, exact_ok=probe_ok and smallest < NEGATIVE_PROBE_BOUND, notes=notes)


class DefectIdentityCheck(BaseCheck):
    """(B+)* B+ + A* A = I on columns of degree <= N-1."""

    check_id = "defect"
    description = "Defect identity in weighted coordinates"

    def run(self) -> VerificationReport:
        result = check_defect_identity(self.config.lam, self.config.mu, self.config.truncation, self.exact)
        notes = [] if result.passed else [f"first failing column (block, degree) = {result.first_failure}"]
        if result.exact:
            return self._report(exact_ok=result.passed, exact=True, notes=notes)
        return self._report(residual=result.residual, notes=notes)


class CEquationCheck(BaseCheck):
    """B- C = -A (B+)* on columns of degree <= N-n-1."""

    check_id = "c-equation"
    description = "Middle operator equation"

    def run(self) -> VerificationReport:
        result = check_C_equation(self.config.lam, self.config.mu, self.config.truncation, self.exact)
        notes = [] if result.passed else [f"first failing column (block, degree) = {result.first_failure}"]
        if result.exact:
            return self._report(exact_ok=result.passed, exact=True, notes=notes)
        return self._report(residual=result.residual, notes=notes)


class ContractivityCheck(BaseCheck):
    """
    The truncated norm of A stays below 1 when the contractivity condition
    holds, and a doubling scan finds a truncation with norm above 1 when it
    fails.
    """

    check_id = "contractivity"
    description = "Operator norm of A against the contractivity condition"

    def run(self) -> VerificationReport:
        lam, mu = self.config.lam, self.config.mu
        if is_contractive(lam, mu):
            norm = operator_norm(build_A(lam, mu, CONTRACTIVITY_DEGREE, exact=False))
            return self._report(residual=max(0.0, norm - 1),
                                notes=[f"norm {norm:.15f} at N={CONTRACTIVITY_DEGREE}"])

        # residual: how far the last norm stays below the violation threshold
        degree, norm = contractivity_scan(lam, mu, margin=VIOLATION_MARGIN)
        residual = max(0.0, 1 + VIOLATION_MARGIN - norm)
        if degree is None:
            return self._report(residual=residual,
                                notes=[f"condition violated but norm stayed at {norm:.6f} up to N=512"])
        return self._report(residual=residual, notes=[f"norm exceeds 1 at N={degree}", f"norm {norm:.6f}"])
