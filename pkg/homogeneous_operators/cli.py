"""
Command-line entry point ``homogeneous-verify``.

Builds a SuiteConfig from an optional JSON config file overlaid with flags,
runs the selected checks, streams one JSON line per report to stdout and
finishes with a summary table.

Exit codes: 0 when every non-skipped check passed, 1 when any check failed,
2 for configuration errors.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from marshmallow import ValidationError

from .charfun import export_samples_csv, theta_generic
from .checks import CHECK_REGISTRY
from .config import LOG_FILE, LOG_LEVEL, CheckStatus, SuiteConfig, VerificationReport
from .exceptions import ConfigurationError, NonGenericParametersError
from .logging_config import get_logger, setup_logging
from .runner import SuiteRunner, exit_code, report_line
from .schemas import SuiteConfigSchema

logger = get_logger(__name__)

EXIT_CONFIG_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homogeneous-verify",
        description="Verify identities of homogeneous contractions and their characteristic functions.",
    )
    parser.add_argument("--config", type=Path, help="JSON suite configuration; flags override its entries")
    parser.add_argument("--check", action="append", default=None,
                        help="Check id to run, or 'all'. Repeatable.")
    parser.add_argument("--lambda", dest="lam", help="lambda, e.g. 5/2 or 2.5")
    parser.add_argument("--mu", help="Comma list of block weights, e.g. 1,1/10")
    parser.add_argument("--truncation", type=int, help="Polynomial degree N per block")
    parser.add_argument("--hardy-truncation", type=int, help="Degree N_H of the Hardy factors")
    parser.add_argument("--interior", type=int, help="Trusted column degree (default N // 3)")
    parser.add_argument("--grid", help="Comma list of complex literals a+bi in the open unit disc")
    parser.add_argument("--tolerance", action="append", default=None, metavar="ID=VALUE",
                        help="Tolerance override for one check. Repeatable.")
    parser.add_argument("--backend", choices=["exact", "float", "auto"])
    parser.add_argument("--seed", type=int)
    parser.add_argument("--report", help="Write the JSON-lines report to this path")
    parser.add_argument("--workers", type=int, help="Worker pool size")
    parser.add_argument("--list-checks", action="store_true", help="List registered checks and exit")
    parser.add_argument("--log-level", default=LOG_LEVEL)
    parser.add_argument("--json-log", action="store_true", help="Emit log records as JSON lines on stderr")
    parser.add_argument("--export-samples", type=Path, metavar="CSV",
                        help="Write theta samples over the grid to a CSV file")
    return parser


def _split(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_tolerances(entries: Sequence[str]) -> Dict[str, float]:
    """
    Raises:
        ConfigurationError: If an entry is not ``id=value``.
    """
    overrides = {}
    for entry in entries:
        check_id, sep, value = entry.partition("=")
        if not sep:
            raise ConfigurationError(f"tolerance must be written id=value, got {entry!r}")
        try:
            overrides[check_id.strip()] = float(value)
        except ValueError:
            raise ConfigurationError(f"tolerance for {check_id} is not a number: {value!r}") from None
    return overrides


def raw_config(args: argparse.Namespace) -> Dict[str, Any]:
    """
    The config file contents overlaid with the flags that were given.

    Raises:
        ConfigurationError: If the config file cannot be read.
    """
    raw: Dict[str, Any] = {}
    if args.config:
        try:
            raw = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read config {args.config}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigurationError(f"config {args.config} must hold a JSON object")

    flags = {
        'lambda': args.lam,
        'truncation': args.truncation,
        'hardy_truncation': args.hardy_truncation,
        'interior': args.interior,
        'backend': args.backend,
        'seed': args.seed,
        'report': args.report,
        'workers': args.workers,
        'checks': args.check,
    }
    raw.update({key: value for key, value in flags.items() if value is not None})
    if args.mu is not None:
        raw['mu'] = _split(args.mu)
    if args.grid is not None:
        raw['grid'] = _split(args.grid)
    if args.tolerance:
        raw['tolerances'] = {**raw.get('tolerances', {}), **_parse_tolerances(args.tolerance)}
    return raw


def load_config(args: argparse.Namespace) -> SuiteConfig:
    """
    Raises:
        ConfigurationError: For any invalid entry.
    """
    try:
        return SuiteConfigSchema().load(raw_config(args))
    except ValidationError as e:
        raise ConfigurationError(json.dumps(e.messages, default=str)) from e
    except ValueError as e:
        raise ConfigurationError(str(e)) from e


def summary_table(reports: Sequence[VerificationReport]) -> str:
    rows = [("check", "status", "residual", "tolerance", "ms")]
    for report in reports:
        residual = "exact" if report.residual is None and report.exact else (
            "-" if report.residual is None else f"{report.residual:.3e}")
        rows.append((report.check_id, report.status.value, residual,
                     f"{report.tolerance:.1e}", f"{report.elapsed_ms:.1f}"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)) for row in rows]
    lines.insert(1, "  ".join("-" * width for width in widths))
    counts = {status: sum(r.status == status for r in reports) for status in CheckStatus}
    lines.append(", ".join(f"{count} {status.value}" for status, count in counts.items()))
    return "\n".join(lines)


def export_samples(config: SuiteConfig, path: Path) -> Optional[Path]:
    """Write theta^(lambda, mu) over the grid; generic parameters only."""
    try:
        samples = [theta_generic(config.lam, config.mu, z, config.truncation, config.effective_interior).matrix_form
                   for z in config.z_grid]
    except NonGenericParametersError as e:
        logger.warning(f"Not exporting samples: {e}")
        return None
    return export_samples_csv(samples, path)


def _config_error_report(error: Exception) -> VerificationReport:
    return VerificationReport(check_id="config", status=CheckStatus.FAIL, notes=[str(error)])


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(level=args.log_level, log_file=LOG_FILE,
                  enable_colors=sys.stderr.isatty(), json_lines=args.json_log)

    if args.list_checks:
        for check_id, cls in CHECK_REGISTRY.items():
            print(f"{check_id:24} {cls.description}")
        return 0

    try:
        config = load_config(args)
        runner = SuiteRunner(config, on_report=lambda report: print(report_line(report), flush=True))
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        print(report_line(_config_error_report(e)))
        return EXIT_CONFIG_ERROR

    if not runner.check_ids:
        logger.warning("No checks selected; pass --check <id> or --check all")

    reports = runner.run()
    if args.export_samples:
        export_samples(config, args.export_samples)

    print(summary_table(reports))
    return exit_code(reports)


if __name__ == "__main__":
    sys.exit(main())
