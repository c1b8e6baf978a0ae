import logging
import re
from dataclasses import dataclass
from pathlib import Path

from src.core.config import AppConfig
from src.core.data import read_tsv
from src.core.system import EngineError
from src.grammar.category import Category, CategoryError, parse_category

logger = logging.getLogger(__name__)

NUMERAL_SURFACE = "<NUM>"
NUMERAL_RE = re.compile(r"^\d+(?:\.\d+)?$")


class LexiconError(EngineError):
    pass


class UnknownWord(EngineError):
    def __init__(self, surface: str, feature: str | None = None):
        detail = f" with feature {feature}" if feature else ""
        super().__init__(f"no lexical entry for {surface!r}{detail}")
        self.surface = surface


@dataclass(frozen=True)
class LexEntry:
    surface: str
    category: Category
    template_id: str
    lemma: str
    flags: frozenset[str] = frozenset()

    def has(self, flag: str) -> bool:
        return flag in self.flags

    @property
    def yori_feature(self) -> str | None:
        for flag in self.flags:
            if flag.startswith("yori="):
                return flag.split("=", 1)[1]
        return None


class Lexicon:
    """Surface forms mapped to CCG entries, loaded from a tab-separated file.

    Columns: surface, category, template_id, lemma, comma-separated flags
    (`-` for none). The pseudo-surface `<NUM>` describes every numeral.
    """

    def __init__(self, entries: list[LexEntry]):
        self._entries: dict[str, list[LexEntry]] = {}
        self._folded: dict[str, str] = {}
        for entry in entries:
            self._entries.setdefault(entry.surface, []).append(entry)
            self._folded.setdefault(entry.surface.casefold(), entry.surface)

    @classmethod
    def load(cls, path: Path | None = None) -> "Lexicon":
        path = path or AppConfig.DEFAULT_LEXICON
        entries = []
        for lineno, row in read_tsv(path):
            if len(row) != 5:
                raise LexiconError(f"{path}:{lineno}: expected 5 columns, got {len(row)}")
            surface, category_text, template_id, lemma, flags = row
            try:
                category = parse_category(category_text)
            except CategoryError as exc:
                raise LexiconError(f"{path}:{lineno}: {exc}") from exc
            flag_set = frozenset() if flags == "-" else frozenset(f.strip() for f in flags.split(","))
            entries.append(LexEntry(surface, category, template_id, lemma, flag_set))
        logger.info("Loaded %d lexical entries from %s", len(entries), path.name)
        return cls(entries)

    def __contains__(self, surface: str) -> bool:
        return self.canonical(surface) is not None

    def canonical(self, surface: str) -> str | None:
        if surface in self._entries:
            return surface
        return self._folded.get(surface.casefold())

    @property
    def surfaces(self) -> set[str]:
        return set(self._entries) - {NUMERAL_SURFACE}

    @property
    def entries(self) -> list[LexEntry]:
        return [e for group in self._entries.values() for e in group]

    def lookup(self, surface: str, feature: str | None = None) -> list[LexEntry]:
        if NUMERAL_RE.match(surface):
            template = self._entries.get(NUMERAL_SURFACE, [])
            return [LexEntry(surface, e.category, e.template_id, surface, e.flags) for e in template]
        canonical = self.canonical(surface)
        found = list(self._entries.get(canonical, [])) if canonical else []
        if feature is not None:
            found = [e for e in found if e.yori_feature in (None, feature)]
        if not found:
            raise UnknownWord(surface, feature)
        return found

    def has_flag(self, surface: str, flag: str) -> bool:
        if NUMERAL_RE.match(surface):
            return flag == "num"
        canonical = self.canonical(surface)
        return any(e.has(flag) for e in self._entries.get(canonical, [])) if canonical else False
