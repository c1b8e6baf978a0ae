import logging
from pathlib import Path
from typing import Iterator

from src.core.config import AppConfig

logger = logging.getLogger(__name__)


def read_tsv(path: Path) -> Iterator[tuple[int, list[str]]]:
    """Yields (line number, cells) for every non-blank, non-comment line."""
    with Path(path).open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.rstrip("\n")
            if not stripped.strip() or stripped.lstrip().startswith("#"):
                continue
            yield lineno, [cell.strip() for cell in stripped.split("\t")]


class GoldenFormulaManager:
    """Reference sentences and their formulas, keyed by example id.

    Columns: id, sentence, formula in the canonical term syntax.
    """

    def __init__(self, filepath: Path | None = None):
        self.filepath = Path(filepath) if filepath else AppConfig.DEFAULT_GOLDEN
        self._sentences: dict[str, str] = {}
        self._formulas: dict[str, str] = {}
        self._load()

    def _load(self) -> None:
        try:
            for lineno, row in read_tsv(self.filepath):
                if len(row) != 3:
                    logger.warning("%s:%d: expected 3 columns, skipping", self.filepath.name, lineno)
                    continue
                key, sentence, formula = row
                self._sentences[key] = sentence
                self._formulas[key] = formula
        except OSError:
            logger.exception("Failed to read golden formulas from %s", self.filepath)

    def ids(self) -> list[str]:
        return sorted(self._formulas)

    def sentence(self, key: str) -> str:
        return self._sentences[key]

    def text(self, key: str) -> str:
        return self._formulas[key]

    def term(self, key: str):
        from src.logic.normalize import beta_normalize
        from src.logic.syntax import parse_term
        return beta_normalize(parse_term(self._formulas[key]))
