"""
Marshmallow schemas for suite configuration files and report lines.

Configuration files are JSON objects whose keys follow the command-line
flags; reports are serialized one JSON object per line.
"""

from typing import Any, Dict, List

from marshmallow import Schema, ValidationError, fields, post_load, validate, validates_schema

from .checks import ALL_CHECKS, CHECK_IDS
from .config import (
    DEFAULT_HARDY_TRUNCATION,
    DEFAULT_TRUNCATION,
    DEFAULT_WORKERS,
    DEFAULT_Z_GRID,
    Backend,
    CheckStatus,
    SuiteConfig,
    Tolerances,
    VerificationReport,
    format_scalar,
    parse_complex,
    parse_scalar,
)


class ScalarField(fields.Field):
    """A real parameter kept exact when written as an integer, decimal or p/q string."""

    def _deserialize(self, value, attr, data, **kwargs):
        try:
            return parse_scalar(value)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"Not a real number: {value!r}") from e

    def _serialize(self, value, attr, obj, **kwargs):
        return None if value is None else format_scalar(value)


class ComplexField(fields.Field):
    """A point of the disc written as ``a+bi``, a number, or a [re, im] pair."""

    def _deserialize(self, value, attr, data, **kwargs):
        try:
            if isinstance(value, (list, tuple)) and len(value) == 2:
                return complex(float(value[0]), float(value[1]))
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                return complex(value)
            return parse_complex(value)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"Not a complex number: {value!r}") from e

    def _serialize(self, value, attr, obj, **kwargs):
        return None if value is None else [value.real, value.imag]


class SuiteConfigSchema(Schema):
    """Schema for a verification suite configuration."""

    lam = ScalarField(
        data_key='lambda',
        load_default=lambda: parse_scalar("5/2"),
        metadata={'description': 'Parameter lambda, e.g. "5/2" or 2.5'}
    )
    mu = fields.List(
        ScalarField(),
        load_default=lambda: [parse_scalar(1), parse_scalar(1)],
        validate=validate.Length(min=1, max=8),
        metadata={'description': 'Block weights mu_0..mu_{n-1}'}
    )
    truncation = fields.Integer(
        load_default=DEFAULT_TRUNCATION,
        validate=validate.Range(min=1, max=2048),
        metadata={'description': 'Polynomial degree N kept per block'}
    )
    hardy_truncation = fields.Integer(
        load_default=DEFAULT_HARDY_TRUNCATION,
        validate=validate.Range(min=1, max=512),
        metadata={'description': 'Degree N_H kept in the Hardy factors of the dilation'}
    )
    interior = fields.Integer(
        load_default=None,
        allow_none=True,
        validate=validate.Range(min=0),
        metadata={'description': 'Trusted column degree (default N // 3)'}
    )
    z_grid = fields.List(
        ComplexField(),
        data_key='grid',
        load_default=lambda: list(DEFAULT_Z_GRID),
        validate=validate.Length(min=1),
        metadata={'description': 'Sample points in the open unit disc'}
    )
    tolerances = fields.Dict(
        keys=fields.String(),
        values=fields.Float(validate=validate.Range(min=0)),
        load_default=dict,
        metadata={'description': 'Tolerance overrides per check id'}
    )
    backend = fields.String(
        load_default=Backend.AUTO.value,
        validate=validate.OneOf([b.value for b in Backend]),
        metadata={'description': 'Arithmetic backend'}
    )
    checks = fields.List(
        fields.String(),
        load_default=list,
        metadata={'description': 'Check ids to run, or "all"'}
    )
    seed = fields.Integer(
        load_default=12345,
        metadata={'description': 'Seed for random Mobius maps'}
    )
    workers = fields.Integer(
        load_default=DEFAULT_WORKERS,
        validate=validate.Range(min=1, max=256),
        metadata={'description': 'Worker pool size'}
    )
    report_path = fields.String(
        data_key='report',
        load_default=None,
        allow_none=True,
        metadata={'description': 'JSON-lines report destination'}
    )

    @validates_schema
    def validate_parameters(self, data: Dict[str, Any], **kwargs):
        """lambda must be positive and the grid must lie in the open disc."""
        lam = data.get('lam')
        if lam is not None and not lam > 0:
            raise ValidationError("lambda must be positive", field_name='lambda')
        outside = [z for z in data.get('z_grid', []) if abs(z) >= 1]
        if outside:
            raise ValidationError(f"grid points outside the open unit disc: {outside}", field_name='grid')

    @validates_schema
    def validate_interior(self, data: Dict[str, Any], **kwargs):
        """The interior bound cannot exceed the truncation."""
        interior = data.get('interior')
        truncation = data.get('truncation', DEFAULT_TRUNCATION)
        if interior is not None and interior > truncation:
            raise ValidationError(f"interior {interior} exceeds truncation {truncation}", field_name='interior')

    @validates_schema
    def validate_check_ids(self, data: Dict[str, Any], **kwargs):
        """Every requested check and every tolerance key must be registered."""
        known = set(CHECK_IDS)
        unknown = [c for c in data.get('checks', []) if c.strip().lower() not in known | {ALL_CHECKS}]
        unknown += [c for c in data.get('tolerances', {}) if c not in known]
        if unknown:
            raise ValidationError(f"Unknown check ids: {', '.join(unknown)}. Available: {', '.join(CHECK_IDS)}")

    @post_load
    def make_config(self, data: Dict[str, Any], **kwargs) -> SuiteConfig:
        return SuiteConfig(
            lam=data['lam'],
            mu=tuple(data['mu']),
            truncation=data['truncation'],
            hardy_truncation=data['hardy_truncation'],
            interior=data['interior'],
            z_grid=tuple(data['z_grid']),
            tolerances=Tolerances(dict(data['tolerances'])),
            backend=Backend(data['backend']),
            checks=tuple(data['checks']),
            seed=data['seed'],
            workers=data['workers'],
            report_path=data['report_path'],
        )


class VerificationReportSchema(Schema):
    """Schema for one report line."""

    check_id = fields.String(required=True)
    status = fields.Function(
        serialize=lambda report: report.status.value,
        deserialize=lambda value: CheckStatus(value),
        required=True,
    )
    parameters = fields.Dict(load_default=dict)
    residual = fields.Method('dump_residual', deserialize='load_residual', allow_none=True)
    tolerance = fields.Float(load_default=0.0)
    elapsed_ms = fields.Function(
        serialize=lambda report: round(report.elapsed_ms, 3),
        deserialize=lambda value: float(value),
        load_default=0.0,
    )
    notes = fields.List(fields.String(), load_default=list)

    def dump_residual(self, report: VerificationReport):
        if report.exact and report.residual is None:
            return "exact"
        return report.residual

    def load_residual(self, value):
        return value

    @post_load
    def make_report(self, data: Dict[str, Any], **kwargs) -> VerificationReport:
        residual = data.pop('residual', None)
        exact = residual == "exact"
        return VerificationReport(residual=None if exact else residual, exact=exact, **data)


def load_reports(lines: List[str]) -> List[VerificationReport]:
    """Parse JSON-lines report text back into reports."""
    schema = VerificationReportSchema()
    return [schema.loads(line) for line in lines if line.strip()]
