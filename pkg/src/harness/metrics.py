import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from src.core.config import AppConfig

logger = logging.getLogger(__name__)

PREDICTION_COLUMNS: tuple[str, ...] = AppConfig.LABELS + (AppConfig.ERROR_LABEL,)


@dataclass(frozen=True)
class ProblemResult:
    problem_id: str
    gold: str
    predicted: str
    evidence: str | None = None
    seconds: float = 0.0
    error_stage: str | None = None
    error_reason: str | None = None
    expected_failure: str | None = None
    oracle: dict = field(default_factory=dict, compare=False)

    @property
    def correct(self) -> bool:
        return self.predicted == self.gold

    @property
    def failed_as_expected(self) -> bool:
        return self.expected_failure is not None and self.error_reason == self.expected_failure


@dataclass(frozen=True)
class LabelScore:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class Metrics:
    total: int
    correct: int
    accuracy: float
    accuracy_excluding_expected: float
    errors: int
    per_label: dict[str, LabelScore]
    confusion: np.ndarray
    majority_label: str | None
    majority_accuracy: float

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "accuracy_excluding_expected_failures": self.accuracy_excluding_expected,
            "errors": self.errors,
            "majority_label": self.majority_label,
            "majority_accuracy": self.majority_accuracy,
            "per_label": {k: vars(v) for k, v in self.per_label.items()},
            "confusion": {
                "rows": list(AppConfig.LABELS),
                "columns": list(PREDICTION_COLUMNS),
                "counts": self.confusion.tolist(),
            },
        }


def confusion_matrix(results: list[ProblemResult]) -> np.ndarray:
    """Gold labels by rows, predictions (with the error column last) by columns."""
    matrix = np.zeros((len(AppConfig.LABELS), len(PREDICTION_COLUMNS)), dtype=int)
    for result in results:
        matrix[AppConfig.LABELS.index(result.gold), PREDICTION_COLUMNS.index(result.predicted)] += 1
    return matrix


def _ratio(numerator: float, denominator: float) -> float:
    return float(numerator / denominator) if denominator else 0.0


def compute_metrics(results: list[ProblemResult]) -> Metrics:
    matrix = confusion_matrix(results)
    total = int(matrix.sum())
    correct = int(np.trace(matrix[:, : len(AppConfig.LABELS)]))
    per_label: dict[str, LabelScore] = {}
    for i, label in enumerate(AppConfig.LABELS):
        hits = matrix[i, i]
        precision = _ratio(hits, matrix[:, i].sum())
        recall = _ratio(hits, matrix[i, :].sum())
        f1 = _ratio(2 * precision * recall, precision + recall)
        per_label[label] = LabelScore(precision, recall, f1, int(matrix[i, :].sum()))
    scored = [r for r in results if r.expected_failure is None]
    golds = Counter(r.gold for r in results)
    majority_label, majority_count = golds.most_common(1)[0] if golds else (None, 0)
    metrics = Metrics(
        total=total,
        correct=correct,
        accuracy=_ratio(correct, total),
        accuracy_excluding_expected=_ratio(sum(r.correct for r in scored), len(scored)),
        errors=int(matrix[:, -1].sum()),
        per_label=per_label,
        confusion=matrix,
        majority_label=majority_label,
        majority_accuracy=_ratio(majority_count, total),
    )
    logger.debug("Accuracy %.3f over %d problems", metrics.accuracy, total)
    return metrics
