import logging
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator

from src.axioms.registry import AdjectiveRegistry
from src.core.config import DEFAULT_STEP_BUDGET, EngineConfig
from src.core.system import EngineError
from src.core.utils import PerfTracker
from src.grammar.lexicon import Lexicon
from src.grammar.parser import ChartParser, Derivation
from src.grammar.tokenizer import Tokenizer
from src.grammar.transforms import MULTIWORD_TABLE, Token, assign_yori_features, insert_cmp, merge_multiword
from src.semantics.compose import compose_sentence
from src.semantics.multisem import MultiSem

logger = logging.getLogger(__name__)

STAGES: tuple[str, ...] = (
    "tokenize", "merge", "insert_cmp", "yori_features", "lexicon", "parse",
    "compose", "extract", "axioms", "prove",
)


class StageError(EngineError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause

    @property
    def reason(self) -> str:
        return type(self.cause).__name__


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Re-raises engine errors from the block as a StageError naming `name`."""
    try:
        yield
    except StageError:
        raise
    except EngineError as e:
        raise StageError(name, e) from e


@dataclass(frozen=True)
class Analysis:
    sentence: str
    tokens: tuple[Token, ...]
    derivation: Derivation
    semantics: MultiSem


class SentenceAnalyzer:
    """Turns one sentence into its two-dimensional meaning.

    Tokens go through multiword merging, covert-morpheme insertion and
    yori tagging before CKY parsing; the top-ranked derivation is composed.
    With `parse_fallback` above zero, lower-ranked derivations are tried
    when composing the better ones fails.
    """

    def __init__(self, lexicon: Lexicon, registry: AdjectiveRegistry, config: EngineConfig | None = None):
        self.lexicon = lexicon
        self.registry = registry
        self.config = config or EngineConfig()
        parts = {part for pattern in MULTIWORD_TABLE for part in pattern}
        self.tokenizer = Tokenizer(lexicon.surfaces | parts)
        self.parser = ChartParser(lexicon, self.config.parse_beam)
        self.budget = DEFAULT_STEP_BUDGET

    def preprocess(self, sentence: str) -> list[Token]:
        with stage("tokenize"):
            raw = self.tokenizer.tokenize(sentence)
        with stage("merge"):
            merged = merge_multiword(raw)
        with stage("insert_cmp"):
            inserted = insert_cmp(merged, self.lexicon)
        with stage("yori_features"):
            tagged = assign_yori_features(inserted, self.lexicon)
        with stage("lexicon"):
            for token in tagged:
                self.lexicon.lookup(token.surface, token.feature)
        return tagged

    def derivations(self, sentence: str) -> list[Derivation]:
        tokens = self.preprocess(sentence)
        with stage("parse"):
            return self.parser.parse(tokens, k=1 + max(self.config.parse_fallback, 0))

    def analyze_full(self, sentence: str) -> Analysis:
        perf = PerfTracker(f"analyze {sentence!r}")
        tokens = self.preprocess(sentence)
        perf.step("preprocess")
        with stage("parse"):
            candidates = self.parser.parse(tokens, k=1 + max(self.config.parse_fallback, 0))
        perf.step("parse")
        failure: StageError | None = None
        for rank, derivation in enumerate(candidates):
            try:
                semantics = self._interpret(derivation)
            except StageError as e:
                failure = failure or e
                logger.debug("Derivation %d of %r rejected: %s", rank, sentence, e)
                continue
            perf.step("compose")
            return Analysis(sentence, tuple(tokens), derivation, semantics)
        assert failure is not None
        raise failure

    def _interpret(self, derivation: Derivation) -> MultiSem:
        with stage("compose"):
            composed = compose_sentence(derivation, self.registry, self.budget)
            semantics = MultiSem(
                self.registry.rescale(composed.at_issue),
                self.registry.rescale(composed.presupposition),
            )
        with stage("extract"):
            semantics.formulas()
        return semantics

    def analyze(self, sentence: str) -> MultiSem:
        return self.analyze_full(sentence).semantics
