import json
import logging
import os
import time
from pathlib import Path

logger = logging.getLogger(__name__)


def atomic_write_json(filepath: Path, data: dict | list) -> None:
    atomic_write_text(filepath, json.dumps(data, indent=4, ensure_ascii=False))


def atomic_write_text(filepath: Path, text: str) -> None:
    try:
        filepath.parent.mkdir(parents=True, exist_ok=True)
        tmp_path = filepath.with_name(filepath.name + ".tmp")
        tmp_path.write_text(text, encoding="utf-8")
        os.replace(tmp_path, filepath)
    except Exception:
        logger.exception("Failed to atomic write %s", filepath)
        raise


class PerfTracker:
    def __init__(self, process_name: str):
        self.process_name = process_name
        self.start_time = time.perf_counter()
        self.last_time = self.start_time
        self.steps: dict[str, float] = {}
        logger.debug("PERF START: %s", self.process_name)

    def step(self, step_name: str) -> float:
        now = time.perf_counter()
        elapsed = now - self.last_time
        total = now - self.start_time
        logger.debug(
            "PERF %s | %s | Step: %.4fs | Total: %.4fs",
            self.process_name, step_name, elapsed, total
        )
        self.steps[step_name] = elapsed
        self.last_time = now
        return elapsed

    @property
    def total(self) -> float:
        return time.perf_counter() - self.start_time
