"""
Tests for configuration dataclasses, scalar parsing and marshmallow schemas.

Run with: pytest homogeneous_operators/tests/test_config.py -v
"""

import math
from fractions import Fraction

import pytest
from marshmallow import ValidationError

from homogeneous_operators.config import (
    DEFAULT_TRUNCATION,
    Backend,
    CheckStatus,
    SuiteConfig,
    Tolerances,
    VerificationReport,
    as_fractions,
    format_scalar,
    is_rational,
    parse_complex,
    parse_scalar,
    status_for,
)
from homogeneous_operators.schemas import SuiteConfigSchema, VerificationReportSchema


class TestScalars:
    """Parsing and rendering of parameters."""

    @pytest.mark.parametrize("text, expected", [
        ("5/2", Fraction(5, 2)),
        ("0.25", Fraction(1, 4)),
        (" 3 ", Fraction(3)),
        (2, Fraction(2)),
        (Fraction(1, 10), Fraction(1, 10)),
    ])
    def test_rational(self, text, expected):
        value = parse_scalar(text)
        assert isinstance(value, Fraction)
        assert value == expected

    def test_float_stays_float(self):
        value = parse_scalar(2.5)
        assert isinstance(value, float) and value == 2.5
        assert math.isnan(parse_scalar("nan"))

    @pytest.mark.parametrize("bad", [True, "abc", "1/0x"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_scalar(bad)

    def test_complex(self):
        assert parse_complex("0.3-0.1i") == complex(0.3, -0.1)
        assert parse_complex(" 0.5j ") == 0.5j

    def test_format(self):
        assert format_scalar(Fraction(5, 2)) == "5/2"
        assert format_scalar(Fraction(3)) == "3"
        assert format_scalar(0.5) == 0.5
        assert format_scalar(complex(0.3, -0.1)) == "+0.3-0.1i"

    def test_is_rational(self):
        assert is_rational(Fraction(1, 3)) and is_rational(4)
        assert not is_rational(0.5) and not is_rational(True)

    def test_as_fractions(self):
        assert as_fractions(["1", 0.5, "1/10"]) == (Fraction(1), 0.5, Fraction(1, 10))


class TestTolerances:
    """Per-check tolerances."""

    def test_defaults(self):
        tolerances = Tolerances()
        assert tolerances.for_check("god") == 0.0
        assert tolerances.for_check("contractivity") == 1e-12
        assert tolerances.for_check("unregistered") == 1e-10

    def test_exact_checks_relax_in_floats(self):
        assert Tolerances().for_check("defect", exact=False) == 1e-10
        assert Tolerances(fallback=1e-9).for_check("c-equation", exact=False) == 1e-9
        assert Tolerances().for_check("master", exact=False) == 1e-6

    def test_override(self):
        assert Tolerances({"god": 1e-3}).for_check("god") == 1e-3

    def test_negative_override(self):
        with pytest.raises(ValueError):
            Tolerances({"master": -1.0})


class TestSuiteConfig:
    """Validation and derived values."""

    @pytest.mark.parametrize("overrides", [
        dict(lam=Fraction(0)),
        dict(mu=()),
        dict(truncation=0),
        dict(hardy_truncation=0),
        dict(interior=13),
        dict(interior=-1),
        dict(z_grid=(0.2, 1.0)),
        dict(workers=0),
    ])
    def test_invalid(self, suite_config, overrides):
        with pytest.raises(ValueError):
            suite_config(**overrides)

    def test_defaults(self):
        config = SuiteConfig()
        assert config.lam == Fraction(5, 2)
        assert config.n == 2
        assert config.effective_interior == DEFAULT_TRUNCATION // 3

    def test_backend_resolution(self, suite_config):
        assert suite_config().resolved_backend == Backend.EXACT
        assert suite_config(lam=2.5).resolved_backend == Backend.FLOAT
        assert suite_config(mu=(Fraction(1), 0.5)).resolved_backend == Backend.FLOAT
        assert suite_config(backend=Backend.FLOAT).resolved_backend == Backend.FLOAT

    def test_parameters(self, suite_config):
        params = suite_config(lam=Fraction(5, 2), mu=(Fraction(1), Fraction(1, 10)), interior=2).parameters()
        assert params == {
            'lambda': "5/2",
            'mu': ["1", "1/10"],
            'N': 12,
            'N_H': 12,
            'interior': 2,
            'backend': "exact",
            'seed': 12345,
        }


class TestStatus:
    """Mapping residuals to a status."""

    def test_within_tolerance(self):
        assert status_for(1e-9, 1e-8) == CheckStatus.PASS
        assert status_for(0.0, 0.0) == CheckStatus.PASS
        assert status_for(1e-3, 1e-4) == CheckStatus.FAIL

    def test_missing_or_non_finite(self):
        assert status_for(None, 1.0) == CheckStatus.FAIL
        assert status_for(float("nan"), 1.0) == CheckStatus.FAIL
        assert status_for(float("inf"), 1.0) == CheckStatus.FAIL

    def test_exact_flag_decides(self):
        assert status_for(None, 0.0, exact_ok=True) == CheckStatus.PASS
        assert status_for(0.0, 1.0, exact_ok=False) == CheckStatus.FAIL

    def test_flag_cannot_pass_a_large_residual(self):
        assert status_for(1.5, 1e-12, exact_ok=True) == CheckStatus.FAIL
        assert status_for(1e-13, 1e-12, exact_ok=True) == CheckStatus.PASS

    def test_report_passed(self):
        assert VerificationReport("god", CheckStatus.PASS).passed
        assert not VerificationReport("god").passed


class TestSuiteConfigSchema:
    """Loading configuration objects."""

    def test_defaults(self):
        config = SuiteConfigSchema().load({})
        assert config.lam == Fraction(5, 2)
        assert config.mu == (Fraction(1), Fraction(1))
        assert config.backend == Backend.AUTO
        assert config.checks == ()
        assert config.report_path is None

    def test_keys(self):
        config = SuiteConfigSchema().load({
            "lambda": 2.5,
            "mu": ["1", "1/10"],
            "grid": [[0.1, 0.2], "0.3i", 0.5],
            "backend": "float",
            "checks": ["god"],
            "tolerances": {"god": 1e-3},
            "report": "out.jsonl",
        })
        assert config.lam == 2.5 and isinstance(config.lam, float)
        assert config.mu == (Fraction(1), Fraction(1, 10))
        assert config.z_grid == (complex(0.1, 0.2), 0.3j, 0.5 + 0j)
        assert config.backend == Backend.FLOAT
        assert config.tolerances.for_check("god") == 1e-3
        assert config.report_path == "out.jsonl"

    @pytest.mark.parametrize("data", [
        {"lambda": "-1"},
        {"lambda": "x"},
        {"mu": []},
        {"grid": ["0.9+0.9i"]},
        {"grid": ["nowhere"]},
        {"truncation": 0},
        {"truncation": 12, "interior": 13},
        {"backend": "gpu"},
        {"checks": ["nope"]},
        {"tolerances": {"nope": 1.0}},
        {"tolerances": {"god": -1.0}},
        {"workers": 0},
    ])
    def test_rejects(self, data):
        with pytest.raises(ValidationError):
            SuiteConfigSchema().load(data)


class TestReportSchema:
    """One JSON line per report."""

    def test_exact_residual(self):
        report = VerificationReport("god", CheckStatus.PASS, {"lambda": "5/2"}, exact=True, elapsed_ms=1.23456)
        data = VerificationReportSchema().dump(report)
        assert data["residual"] == "exact"
        assert data["status"] == "pass"
        assert data["elapsed_ms"] == 1.235
        loaded = VerificationReportSchema().load(data)
        assert loaded.exact and loaded.residual is None
        assert loaded.status == CheckStatus.PASS
        assert loaded.parameters == {"lambda": "5/2"}

    def test_numeric_residual(self):
        report = VerificationReport("master", CheckStatus.FAIL, residual=2e-3, tolerance=1e-6, notes=["z=0.3"])
        loaded = VerificationReportSchema().loads(VerificationReportSchema().dumps(report))
        assert loaded.residual == 2e-3
        assert not loaded.exact
        assert loaded.notes == ["z=0.3"]
