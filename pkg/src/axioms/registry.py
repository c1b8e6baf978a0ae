import logging
from dataclasses import dataclass
from pathlib import Path

from src.core.config import AppConfig
from src.core.data import read_tsv
from src.core.system import EngineError
from src.logic.terms import (
    Application, Constant, Formula, Term, children, spine, subterms,
)
from src.logic.normalize import rebuild

logger = logging.getLogger(__name__)

POSITIVE = "+"
NEGATIVE = "-"


class RegistryError(EngineError):
    pass


class UnregisteredAdjective(EngineError):
    def __init__(self, lemma: str):
        super().__init__(f"adjective {lemma!r} is not in the registry")
        self.lemma = lemma


@dataclass(frozen=True)
class AdjectiveInfo:
    lemma: str
    polarity: str
    antonym: str | None
    scale_id: str
    unit: str | None

    @property
    def theta(self) -> str:
        return f"theta_{self.scale_id}"

    @property
    def delta(self) -> str:
        return f"delta_{self.scale_id}"


class AdjectiveRegistry:
    """Gradable adjectives with polarity, antonym and measurement unit.

    Antonym pairs share one scale, named after the positive member, so
    both members use the same theta and delta constants.
    """

    def __init__(self, infos: list[AdjectiveInfo]):
        self._infos = {info.lemma: info for info in infos}
        self._validate()

    @classmethod
    def from_rows(cls, rows: list[tuple[str, str, str | None, str | None]]) -> "AdjectiveRegistry":
        polarity_of = {lemma: polarity for lemma, polarity, _, _ in rows}
        infos = []
        for lemma, polarity, antonym, unit in rows:
            if polarity not in (POSITIVE, NEGATIVE):
                raise RegistryError(f"{lemma}: polarity must be + or -, got {polarity!r}")
            scale = lemma
            if polarity == NEGATIVE and antonym and polarity_of.get(antonym) == POSITIVE:
                scale = antonym
            infos.append(AdjectiveInfo(lemma, polarity, antonym, scale, unit))
        return cls(infos)

    @classmethod
    def load(cls, path: Path | None = None) -> "AdjectiveRegistry":
        path = path or AppConfig.DEFAULT_ADJECTIVES
        rows = []
        for lineno, row in read_tsv(path):
            if len(row) != 4:
                raise RegistryError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            lemma, polarity, antonym, unit = row
            rows.append((lemma, polarity, None if antonym == "-" else antonym, None if unit == "-" else unit))
        registry = cls.from_rows(rows)
        logger.info("Loaded %d adjectives from %s", len(rows), path.name)
        return registry

    def _validate(self) -> None:
        for info in self._infos.values():
            if info.antonym is None:
                continue
            partner = self._infos.get(info.antonym)
            if partner is None:
                raise RegistryError(f"{info.lemma}: antonym {info.antonym!r} is not registered")
            if partner.antonym != info.lemma:
                raise RegistryError(f"{info.lemma}: antonym relation with {info.antonym} is not symmetric")
            if partner.polarity == info.polarity:
                raise RegistryError(f"{info.lemma} and {info.antonym} must have opposite polarity")

    def __contains__(self, lemma: str) -> bool:
        return lemma in self._infos

    def get(self, lemma: str) -> AdjectiveInfo:
        try:
            return self._infos[lemma]
        except KeyError:
            raise UnregisteredAdjective(lemma) from None

    @property
    def lemmas(self) -> list[str]:
        return sorted(self._infos)

    def collect_adjectives(self, formulas: list[Formula]) -> set[str]:
        """Registered lemmas used as predicates in `formulas`, closed under antonymy."""
        found: set[str] = set()
        for formula in formulas:
            for sub in subterms(formula):
                if isinstance(sub, Application):
                    head, args = spine(sub)
                    if isinstance(head, Constant) and len(args) == 2 and head.name in self._infos:
                        found.add(head.name)
        for lemma in list(found):
            antonym = self._infos[lemma].antonym
            if antonym:
                found.add(antonym)
        return found

    def rescale(self, term: Term) -> Term:
        """Renames per-lemma theta/delta constants to the constants of the lemma's scale."""
        if isinstance(term, Constant):
            for prefix in ("theta_", "delta_"):
                if term.name.startswith(prefix):
                    lemma = term.name[len(prefix):]
                    info = self._infos.get(lemma)
                    if info is not None and info.scale_id != lemma:
                        return Constant(prefix + info.scale_id, term.kind)
            return term
        kids = list(children(term))
        if not kids:
            return term
        return rebuild(term, [self.rescale(k) for k in kids])
