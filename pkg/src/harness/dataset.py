import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from src.core.config import AppConfig
from src.core.system import EngineError
from src.pipeline.decide import Problem

logger = logging.getLogger(__name__)

REQUIRED_FIELDS: tuple[str, ...] = ("id", "premises", "hypothesis", "gold")


class DatasetError(EngineError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


@dataclass
class Dataset:
    name: str
    problems: list[Problem] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.problems)

    def __iter__(self):
        return iter(self.problems)

    @property
    def label_counts(self) -> dict[str, int]:
        counts = Counter(p.gold for p in self.problems)
        return {label: counts.get(label, 0) for label in AppConfig.LABELS}

    def get(self, problem_id: str) -> Problem:
        for problem in self.problems:
            if problem.id == problem_id:
                return problem
        raise KeyError(problem_id)


def _problem(record: object, line: int) -> Problem:
    if not isinstance(record, dict):
        raise DatasetError(line, "expected a JSON object")
    missing = [name for name in REQUIRED_FIELDS if name not in record]
    if missing:
        raise DatasetError(line, f"missing field(s): {', '.join(missing)}")
    premises = record["premises"]
    if not isinstance(premises, list) or not premises or not all(isinstance(p, str) for p in premises):
        raise DatasetError(line, "premises must be a non-empty list of strings")
    if not isinstance(record["hypothesis"], str):
        raise DatasetError(line, "hypothesis must be a string")
    if record["gold"] not in AppConfig.LABELS:
        raise DatasetError(line, f"gold label {record['gold']!r} is not one of {', '.join(AppConfig.LABELS)}")
    extra = {k: v for k, v in record.items() if k not in REQUIRED_FIELDS}
    return Problem(str(record["id"]), tuple(premises), record["hypothesis"], record["gold"], extra)


def load_dataset(path: Path | None = None) -> Dataset:
    """Reads one problem per JSON line; blank lines are skipped, unknown fields kept as metadata."""
    path = Path(path or AppConfig.DEFAULT_DATASET)
    dataset = Dataset(path.stem)
    seen: set[str] = set()
    with path.open(encoding="utf-8") as handle:
        for line, text in enumerate(handle, start=1):
            if not text.strip():
                continue
            try:
                record = json.loads(text)
            except json.JSONDecodeError as e:
                raise DatasetError(line, f"malformed JSON: {e.msg}") from e
            problem = _problem(record, line)
            if problem.id in seen:
                raise DatasetError(line, f"duplicate id {problem.id!r}")
            seen.add(problem.id)
            dataset.problems.append(problem)
    dataset.metadata["label_counts"] = dataset.label_counts
    logger.info("Loaded %d problems from %s", len(dataset), path.name)
    return dataset
