"""
Checks on the Mobius group: the cocycle, the multiplier, the projective law
of the discrete series and the companion representation identities.
"""

import numpy as np

from ..config import CompanionSide, VerificationReport
from ..mobius import (
    compose,
    cocycle_c,
    invert,
    involution_at,
    multiplier_m0,
    multiplier_raw,
    random_mobius,
    rotation,
    star,
)
from ..reps import check_projective_law, companion_check
from .base import BaseCheck

COCYCLE_PAIRS = 1000
COCYCLE_POINTS = 10
MULTIPLIER_PAIRS = 10000
MULTIPLIER_TRIPLES = 1000
PROJECTIVE_PAIRS = 100
PROJECTIVE_CONFIG_PAIRS = 10
BRANCH_NOTE = "m0 values are relative to the principal branch s(beta) = exp(i Arg(beta) / 2)"


def _closed_disc_points(rng: np.random.Generator, count: int) -> np.ndarray:
    radius = np.sqrt(rng.uniform(size=count))
    return radius * np.exp(2j * np.pi * rng.uniform(size=count))


def companion_maps():
    """rot(i), phi_0.3 and rot(i) o phi_0.2."""
    return [rotation(1j), involution_at(0.3), compose(rotation(1j), involution_at(0.2))]


class CocycleCheck(BaseCheck):
    """c(f, z)^2 = f'(z) and the chain rule m0(f, g) c(g^-1, f^-1 z) c(f^-1, z) = c(g^-1 f^-1, z)."""

    check_id = "cocycle"
    description = "Cocycle square and chain identities on random maps"

    def run(self) -> VerificationReport:
        rng = self.rng()
        square = 0.0
        chain = 0.0
        for _ in range(COCYCLE_PAIRS):
            f, g = random_mobius(rng), random_mobius(rng)
            z = _closed_disc_points(rng, COCYCLE_POINTS)
            square = max(square, float(np.max(np.abs(cocycle_c(f, z) ** 2 - f.derivative(z)))))
            f_inv, g_inv = invert(f), invert(g)
            lhs = multiplier_m0(f, g) * cocycle_c(g_inv, f_inv(z)) * cocycle_c(f_inv, z)
            rhs = cocycle_c(compose(g_inv, f_inv), z)
            chain = max(chain, float(np.max(np.abs(lhs - rhs))))
        notes = [f"square residual {square:.3e}", f"chain residual {chain:.3e}", BRANCH_NOTE]
        return self._report(residual=max(square, chain), notes=notes)


class MultiplierCheck(BaseCheck):
    """
    m0 is a sign, satisfies the multiplier cocycle identity, the inverse
    identity for m0(f, g) and the relation m0(g^-1, f^-1) = m0(f*, g*).
    """

    check_id = "multiplier"
    description = "Sign, cocycle and symmetry properties of m0"

    def run(self) -> VerificationReport:
        rng = self.rng()
        residual = 0.0
        failures = {"mult": 0, "simple": 0, "star": 0}
        for _ in range(MULTIPLIER_PAIRS):
            f, g = random_mobius(rng), random_mobius(rng)
            raw = multiplier_raw(f, g)
            residual = max(residual, abs(abs(raw) - 1), abs(raw * raw - 1))
            m = multiplier_m0(f, g)
            fg = compose(f, g)
            simple = (multiplier_m0(f, invert(f)) * multiplier_m0(g, invert(g))
                      * multiplier_m0(fg, invert(fg)) * multiplier_m0(invert(g), invert(f)))
            failures["simple"] += simple != m
            failures["star"] += multiplier_m0(invert(g), invert(f)) != multiplier_m0(star(f), star(g))

        for _ in range(MULTIPLIER_TRIPLES):
            f, g, h = random_mobius(rng), random_mobius(rng), random_mobius(rng)
            lhs = multiplier_m0(f, g) * multiplier_m0(compose(f, g), h)
            rhs = multiplier_m0(f, compose(g, h)) * multiplier_m0(g, h)
            failures["mult"] += lhs != rhs

        notes = [f"{name} identity failures: {count}" for name, count in failures.items() if count]
        notes.append(BRANCH_NOTE)
        tolerance = self.config.tolerances.for_check(self.check_id, exact=False)
        passed = residual <= tolerance and not any(failures.values())
        return self._report(residual=residual, exact_ok=passed, notes=notes)


class ProjectiveLawCheck(BaseCheck):
    """
    D(fg) = m D(f) D(g) with a unimodular m; for lambda = 1 the extracted m is m0(f, g).
    """

    check_id = "projective-law"
    description = "Projective law of the truncated discrete series"

    def run(self) -> VerificationReport:
        config = self.config
        interior = min(config.effective_interior, config.truncation // 3)
        rng = self.rng()
        worst_fit = 0.0
        worst_multiplier = 0.0
        largest_truncation = config.truncation
        for index in range(PROJECTIVE_PAIRS):
            f, g = random_mobius(rng), random_mobius(rng)
            result = check_projective_law(1, f, g, config.truncation, interior)
            worst_fit = max(worst_fit, result.residual)
            worst_multiplier = max(worst_multiplier, abs(result.multiplier - multiplier_m0(f, g)))
            largest_truncation = max(largest_truncation, result.truncation)
            if index < PROJECTIVE_CONFIG_PAIRS and config.lam != 1:
                other = check_projective_law(config.lam, f, g, config.truncation, interior)
                worst_fit = max(worst_fit, other.residual)
                largest_truncation = max(largest_truncation, other.truncation)
            if (index + 1) % 25 == 0:
                self._log_progress(f"{index + 1}/{PROJECTIVE_PAIRS} pairs")
        notes = [f"fit residual {worst_fit:.3e}", f"multiplier deviation from m0 {worst_multiplier:.3e}",
                 BRANCH_NOTE]
        if largest_truncation > config.truncation:
            notes.append(f"truncation raised up to N={largest_truncation}")
        return self._report(residual=max(worst_fit, worst_multiplier), notes=notes)


class CompanionCheck(BaseCheck):
    """Both companion representation identities for rot(i), phi_0.3 and rot(i) o phi_0.2."""

    check_id = "companion"
    description = "Companion representations in inclusion coordinates"

    def run(self) -> VerificationReport:
        config = self.config
        interior = min(config.effective_interior, config.truncation - config.n)
        worst = 0.0
        notes = []
        for f in companion_maps():
            for side in CompanionSide:
                residual = companion_check(config.lam, config.mu, f, config.truncation, interior, side)
                worst = max(worst, residual)
                notes.append(f"alpha={f.alpha:.3f}, {side.value}: {residual:.3e}")
        notes.append(BRANCH_NOTE)
        return self._report(residual=worst, notes=notes)
