import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from src.core.system import EventBus
from src.harness.dataset import Dataset
from src.harness.metrics import Metrics, ProblemResult, compute_metrics
from src.pipeline.analyze import StageError
from src.pipeline.decide import Pipeline, Problem, Verdict

logger = logging.getLogger(__name__)


@dataclass
class Evaluation:
    dataset: Dataset
    results: list[ProblemResult]
    metrics: Metrics
    tptp_files: list[Path]


class Evaluator:
    """Runs the pipeline over a dataset with a bounded worker pool and aggregates metrics."""

    def __init__(self, pipeline: Pipeline, event_bus: EventBus | None = None, oracle_check: bool = False,
                 tptp_out: Path | None = None):
        self.pipeline = pipeline
        self.event_bus = event_bus
        self.oracle_check = oracle_check
        self.tptp_out = tptp_out

    def _run_one(self, problem: Problem) -> tuple[ProblemResult, list[Path]]:
        verdict = self.pipeline.decide(problem)
        oracle = self.pipeline.oracle_check(verdict) if self.oracle_check else {}
        written: list[Path] = []
        if self.tptp_out is not None and verdict.task is not None:
            try:
                written = self.pipeline.export_tptp(problem, self.tptp_out)
            except (StageError, OSError):
                logger.exception("Could not export TPTP files for %s", problem.id)
        result = to_result(problem, verdict, oracle)
        if self.event_bus:
            self.event_bus.publish("problem_decided", result)
        return result, written

    def evaluate(self, dataset: Dataset) -> Evaluation:
        workers = max(1, self.pipeline.config.eval_workers)
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="Eval") as pool:
            outcomes = list(pool.map(self._run_one, dataset.problems))
        results = sorted((r for r, _ in outcomes), key=lambda r: r.problem_id)
        files = sorted(p for _, paths in outcomes for p in paths)
        return Evaluation(dataset, results, compute_metrics(results), files)


def to_result(problem: Problem, verdict: Verdict, oracle: dict | None = None) -> ProblemResult:
    return ProblemResult(
        problem_id=problem.id,
        gold=problem.gold,
        predicted=verdict.label,
        evidence=verdict.evidence,
        seconds=round(verdict.seconds, 3),
        error_stage=verdict.error_stage,
        error_reason=verdict.error_reason,
        expected_failure=problem.expected_failure,
        oracle=oracle or {},
    )


def evaluate(dataset: Dataset, pipeline: Pipeline, event_bus: EventBus | None = None) -> Metrics:
    return Evaluator(pipeline, event_bus).evaluate(dataset).metrics
