import logging
from pathlib import Path

from src.core.config import AppConfig
from src.core.system import EngineError
from src.core.utils import atomic_write_json, atomic_write_text
from src.harness.metrics import PREDICTION_COLUMNS, Metrics, ProblemResult

logger = logging.getLogger(__name__)

REPORT_FORMATS: tuple[str, ...] = ("text", "json", "both")


class ReportError(EngineError):
    pass


def _direction(result: ProblemResult) -> str:
    if result.error_stage:
        return f"error@{result.error_stage}"
    return result.evidence or "-"


def render_text(name: str, metrics: Metrics, results: list[ProblemResult], timings: bool = True) -> str:
    lines = [f"{AppConfig.PROGRAM_NAME} {AppConfig.VERSION} evaluation report: {name}", ""]
    header = f"{'id':<24}{'gold':<9}{'predicted':<11}{'proof':<22}" + ("time" if timings else "")
    lines += [header, "-" * len(header)]
    if not results:
        lines.append("(no problems were evaluated)")
    for r in results:
        row = f"{r.problem_id:<24}{r.gold:<9}{r.predicted:<11}{_direction(r):<22}"
        if timings:
            row += f"{r.seconds:.3f}s"
        if r.expected_failure:
            row += f"  [expected failure: {r.expected_failure}]"
        lines.append(row.rstrip())
    lines += [
        "",
        f"Accuracy: {metrics.accuracy:.3f} ({metrics.correct}/{metrics.total})",
        f"Accuracy excluding expected failures: {metrics.accuracy_excluding_expected:.3f}",
        f"Stage errors: {metrics.errors}",
    ]
    if metrics.majority_label:
        lines.append(f"Majority baseline ({metrics.majority_label}): {metrics.majority_accuracy:.3f}")
    lines += ["", f"{'label':<10}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>9}"]
    for label, score in metrics.per_label.items():
        lines.append(f"{label:<10}{score.precision:>10.3f}{score.recall:>10.3f}{score.f1:>10.3f}{score.support:>9}")
    lines += ["", "confusion (gold \\ predicted): " + " ".join(PREDICTION_COLUMNS)]
    for label, row in zip(AppConfig.LABELS, metrics.confusion.tolist()):
        lines.append(f"{label:<10}" + "".join(f"{count:>9}" for count in row))
    return "\n".join(lines) + "\n"


def render_json(name: str, metrics: Metrics, results: list[ProblemResult], timings: bool = True) -> dict:
    rows = []
    for r in results:
        row = {
            "id": r.problem_id,
            "gold": r.gold,
            "predicted": r.predicted,
            "evidence": r.evidence,
            "error_stage": r.error_stage,
            "error_reason": r.error_reason,
            "expected_failure": r.expected_failure,
        }
        if r.oracle:
            row["oracle"] = r.oracle
        if timings:
            row["seconds"] = r.seconds
        rows.append(row)
    return {"dataset": name, "version": AppConfig.VERSION, "metrics": metrics.as_dict(), "results": rows}


def emit_report(name: str, metrics: Metrics, results: list[ProblemResult], out_dir: Path,
                fmt: str = "both", timings: bool = True) -> list[Path]:
    """Writes `<name>_report.txt` and/or `<name>_results.json` under `out_dir`."""
    if fmt not in REPORT_FORMATS:
        raise ReportError(f"unknown report format {fmt!r}")
    written: list[Path] = []
    try:
        if fmt in ("text", "both"):
            path = out_dir / f"{name}_report.txt"
            atomic_write_text(path, render_text(name, metrics, results, timings))
            written.append(path)
        if fmt in ("json", "both"):
            path = out_dir / f"{name}_results.json"
            atomic_write_json(path, render_json(name, metrics, results, timings))
            written.append(path)
    except OSError as e:
        raise ReportError(f"cannot write report to {out_dir}: {e}") from e
    logger.info("Report written to %s", ", ".join(str(p) for p in written))
    return written
