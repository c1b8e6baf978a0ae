import logging
from typing import Iterable

from src.core.system import EngineError
from src.grammar.lexicon import NUMERAL_RE

logger = logging.getLogger(__name__)

SENTENCE_FINAL = (".", "。")


class UnknownToken(EngineError):
    def __init__(self, position: int, fragment: str):
        super().__init__(f"cannot segment {fragment!r} at character {position}")
        self.position = position
        self.fragment = fragment


class Tokenizer:
    """Splits romanized Japanese into lexicon surfaces.

    Whitespace separates chunks, hyphens separate morphemes. A run of
    hyphen-joined morphemes that is itself a known surface (PC-6082,
    subete-no) stays whole; the longest such run wins.
    """

    def __init__(self, vocabulary: Iterable[str]):
        self._vocabulary: dict[str, str] = {}
        for surface in vocabulary:
            self._vocabulary.setdefault(surface.casefold(), surface)
        self._max_chars = max((len(s) for s in self._vocabulary), default=0)

    def known(self, surface: str) -> str | None:
        return self._vocabulary.get(surface.casefold())

    def tokenize(self, text: str) -> list[str]:
        tokens: list[str] = []
        offset = 0
        for chunk in text.split():
            start = text.index(chunk, offset)
            offset = start + len(chunk)
            final = None
            if chunk.endswith(SENTENCE_FINAL) and len(chunk) > 1:
                final, chunk = ".", chunk[:-1]
            elif chunk in SENTENCE_FINAL:
                tokens.append(".")
                continue
            tokens.extend(self._segment_chunk(chunk, start))
            if final:
                tokens.append(final)
        logger.debug("Tokenized %r into %s", text, tokens)
        return tokens

    def _segment_chunk(self, chunk: str, start: int) -> list[str]:
        parts = chunk.split("-")
        positions = []
        cursor = start
        for part in parts:
            positions.append(cursor)
            cursor += len(part) + 1
        result: list[str] = []
        i = 0
        while i < len(parts):
            matched = None
            for j in range(len(parts), i, -1):
                candidate = self.known("-".join(parts[i:j]))
                if candidate is not None:
                    matched = (candidate, j)
                    break
            if matched:
                result.append(matched[0])
                i = matched[1]
                continue
            part = parts[i]
            if NUMERAL_RE.match(part):
                result.append(part)
            elif part:
                result.extend(self._split_characters(part, positions[i]))
            i += 1
        return result

    def _split_characters(self, part: str, position: int) -> list[str]:
        """Longest-prefix segmentation of a morpheme that must cover it entirely."""
        best: list[list[str] | None] = [None] * (len(part) + 1)
        best[len(part)] = []
        for i in range(len(part) - 1, -1, -1):
            for j in range(min(len(part), i + self._max_chars), i, -1):
                surface = self.known(part[i:j])
                if surface is not None and best[j] is not None:
                    best[i] = [surface] + best[j]
                    break
        if best[0] is None:
            raise UnknownToken(position, part)
        return best[0]
