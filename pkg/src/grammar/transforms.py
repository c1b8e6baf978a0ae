import logging
from dataclasses import dataclass

from src.grammar.lexicon import NUMERAL_RE, Lexicon

logger = logging.getLogger(__name__)

MULTIWORD_TABLE: tuple[tuple[str, ...], ...] = (
    ("to", "onaji", "kurai", "no"),
    ("to", "onaji", "kurai"),
    ("izyoo", "ni"),
    ("yori", "mo"),
    ("te", "i", "ru"),
)

CMP = "cmp"
STANDARD_MARKERS: frozenset[str] = frozenset({
    "yori", "yori-mo", "izyoo-ni", "izyoo", "hodo",
    "to-onaji-kurai", "to-onaji-kurai-no", "onaji",
})
YORI_SURFACES: frozenset[str] = frozenset({"yori", "yori-mo"})
CLAUSE_TAIL: frozenset[str] = frozenset({
    ".", "da", "nai", "toiu-wake-de-wa-nai", "te-i-ru", "te", "i", "ru",
})

YORI_FEATURES: tuple[str, ...] = ("plain", "measure", "clausal", "phrasal-clausal", "differential")


@dataclass(frozen=True)
class Token:
    surface: str
    feature: str | None = None

    def __str__(self) -> str:
        return f"{self.surface}:{self.feature}" if self.feature else self.surface


def merge_multiword(tokens: list[str]) -> list[str]:
    """Joins fixed multi-token expressions with hyphens, longest match first, left to right."""
    merged: list[str] = []
    i = 0
    while i < len(tokens):
        for pattern in MULTIWORD_TABLE:
            if tuple(tokens[i:i + len(pattern)]) == pattern:
                merged.append("-".join(pattern))
                i += len(pattern)
                break
        else:
            merged.append(tokens[i])
            i += 1
    return merged


def _is_measure_phrase(tokens: list[str], index: int, lexicon: Lexicon) -> bool:
    """True when tokens[index - 1] is a unit preceded by a numeral."""
    return (
        index >= 2
        and lexicon.has_flag(tokens[index - 1], "unit")
        and bool(NUMERAL_RE.match(tokens[index - 2]))
    )


def insert_cmp(tokens: list[str], lexicon: Lexicon) -> list[str]:
    """Inserts the covert positive-form morpheme before a bare gradable predicate.

    The predicate is the last token before the clause tail. Nothing is
    inserted when a standard marker or a measure phrase precedes it, or
    when the morpheme is already there.
    """
    position = len(tokens) - 1
    while position >= 0 and tokens[position] in CLAUSE_TAIL:
        position -= 1
    if position < 0 or not lexicon.has_flag(tokens[position], "pred"):
        return list(tokens)
    if position > 0 and tokens[position - 1] == CMP:
        return list(tokens)
    before = tokens[:position]
    if any(token in STANDARD_MARKERS for token in before):
        return list(tokens)
    if any(_is_measure_phrase(before, i, lexicon) for i in range(len(before) + 1)):
        return list(tokens)
    return tokens[:position] + [CMP] + tokens[position:]


def assign_yori_features(tokens: list[str], lexicon: Lexicon) -> list[Token]:
    """Tags every yori with the construction it heads; other tokens are untagged."""
    tagged: list[Token] = []
    for i, surface in enumerate(tokens):
        if surface not in YORI_SURFACES:
            tagged.append(Token(surface))
            continue
        tagged.append(Token(surface, _yori_feature(tokens, i, lexicon)))
    return tagged


def _yori_feature(tokens: list[str], i: int, lexicon: Lexicon) -> str:
    previous = tokens[i - 1] if i > 0 else ""
    following = tokens[i + 1:]
    if _is_measure_phrase(tokens, i, lexicon):
        return "measure"
    if following and NUMERAL_RE.match(following[0]):
        return "differential"
    if lexicon.has_flag(previous, "verb"):
        return "clausal"
    if previous == "no" and i >= 2 and lexicon.has_flag(tokens[i - 2], "verb"):
        return "clausal"
    if (
        len(following) >= 2
        and lexicon.has_flag(following[0], "adj")
        and lexicon.has_flag(following[1], "noun")
    ):
        return "phrasal-clausal"
    return "plain"
