"""
Suite runner.

Dispatches the selected checks to a thread pool, turns exceptions into
reports and returns the reports in registry order regardless of completion
order.
"""

import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import Callable, Dict, List, Optional

from .checks import get_check, resolve_check_ids
from .config import CheckStatus, SuiteConfig, VerificationReport
from .exceptions import NonGenericParametersError
from .logging_config import get_logger, log_check_complete, log_check_error, log_check_start
from .schemas import VerificationReportSchema

logger = get_logger(__name__)

ReportCallback = Callable[[VerificationReport], None]
_REPORT_SCHEMA = VerificationReportSchema()


def report_line(report: VerificationReport) -> str:
    """One JSON line for a report."""
    return _REPORT_SCHEMA.dumps(report)


class SuiteRunner:
    """
    Run a verification suite.

    Args:
        config: The suite configuration; ``config.checks`` selects the checks.
        on_report: Called with every report as soon as its check finishes.
    """

    def __init__(self, config: SuiteConfig, on_report: Optional[ReportCallback] = None):
        self.config = config
        self.check_ids = resolve_check_ids(config.checks)
        self._on_report = on_report

    def run(self) -> List[VerificationReport]:
        """Run every selected check and return the reports in registry order."""
        if not self.check_ids:
            logger.info("No checks selected")
            self._write_report_file([])
            return []

        logger.info(f"Running {len(self.check_ids)} checks with {self.config.workers} workers")
        results: Dict[str, VerificationReport] = {}
        workers = min(self.config.workers, len(self.check_ids))
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="check") as pool:
            futures = {pool.submit(self.run_check, check_id): check_id for check_id in self.check_ids}
            for future in as_completed(futures):
                report = future.result()
                results[futures[future]] = report
                if self._on_report:
                    self._on_report(report)

        reports = [results[check_id] for check_id in self.check_ids]
        self._write_report_file(reports)
        return reports

    def run_check(self, check_id: str) -> VerificationReport:
        """Run one check; never raises."""
        check = get_check(check_id)(self.config)
        check.set_callback(lambda message: logger.debug(f"[{check_id}] {message}"))
        log_check_start(logger, check_id, self.config.parameters())
        start = time.perf_counter()
        try:
            report = check.run()
        except NonGenericParametersError as e:
            logger.info(f"Skipping '{check_id}': {e}")
            report = VerificationReport(
                check_id=check_id,
                status=CheckStatus.SKIPPED,
                parameters=self.config.parameters(),
                tolerance=self.config.tolerances.for_check(check_id),
                notes=[f"non-generic parameters: {e}"],
            )
        except Exception as e:
            log_check_error(logger, check_id, e)
            report = VerificationReport(
                check_id=check_id,
                status=CheckStatus.FAIL,
                parameters=self.config.parameters(),
                tolerance=self.config.tolerances.for_check(check_id),
                notes=[f"{type(e).__name__}: {e}"],
            )
        report.elapsed_ms = (time.perf_counter() - start) * 1000.0
        log_check_complete(logger, check_id, report.status.value, report.residual, report.elapsed_ms)
        return report

    def _write_report_file(self, reports: List[VerificationReport]) -> None:
        if not self.config.report_path:
            return
        path = Path(self.config.report_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as handle:
            for report in reports:
                handle.write(report_line(report) + "\n")
        logger.info(f"Wrote {len(reports)} reports to {path}")


def run_suite(config: SuiteConfig, on_report: Optional[ReportCallback] = None) -> List[VerificationReport]:
    """Run the checks selected by ``config``.

    Raises:
        ConfigurationError: If a check id is not registered.
    """
    return SuiteRunner(config, on_report).run()


def exit_code(reports: List[VerificationReport]) -> int:
    """0 when every non-skipped check passed, 1 otherwise."""
    return 0 if all(r.status != CheckStatus.FAIL for r in reports) else 1
