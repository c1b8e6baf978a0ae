import logging
from dataclasses import dataclass, field
from typing import Iterator

from nltk.tree import Tree

from src.core.config import DEFAULT_PARSE_BEAM
from src.core.system import EngineError
from src.grammar.category import Atomic, Category, Rule, combine
from src.grammar.lexicon import LexEntry, Lexicon
from src.grammar.transforms import Token

logger = logging.getLogger(__name__)

RULE_ORDER: tuple[Rule, ...] = (Rule.FA, Rule.BA, Rule.FC, Rule.BC, Rule.FCX, Rule.BCX)


class NoParse(EngineError):
    def __init__(self, tokens: list[Token], best_fragments: list[str]):
        shown = " | ".join(best_fragments) or "none"
        super().__init__(f"no derivation of S spans {' '.join(map(str, tokens))}; largest fragments: {shown}")
        self.best_fragments = best_fragments


@dataclass(frozen=True)
class Leaf:
    entry: LexEntry
    token: Token
    index: int

    @property
    def category(self) -> Category:
        return self.entry.category

    @property
    def span(self) -> tuple[int, int]:
        return self.index, self.index + 1

    @property
    def cost(self) -> tuple[int, int]:
        return 0, 0

    def bracket(self) -> str:
        return f"[{self.category} {self.token.surface}]"


@dataclass(frozen=True)
class Node:
    rule: Rule
    category: Category
    left: "Derivation"
    right: "Derivation"
    cost: tuple[int, int] = field(compare=False, default=(0, 0))

    @property
    def span(self) -> tuple[int, int]:
        return self.left.span[0], self.right.span[1]

    def bracket(self) -> str:
        return f"[{self.category} {self.rule.value} {self.left.bracket()} {self.right.bracket()}]"


Derivation = Leaf | Node


def make_node(rule: Rule, category: Category, left: Derivation, right: Derivation) -> Node:
    crossed = left.cost[0] + right.cost[0] + (1 if rule.is_crossed else 0)
    composed = left.cost[1] + right.cost[1] + (1 if rule.is_composition else 0)
    return Node(rule, category, left, right, (crossed, composed))


def rank_key(derivation: Derivation) -> tuple[int, int, str]:
    """Fewer crossed compositions first, then fewer compositions, then bracket string."""
    return derivation.cost[0], derivation.cost[1], derivation.bracket()


def leaves(derivation: Derivation) -> Iterator[Leaf]:
    if isinstance(derivation, Leaf):
        yield derivation
    else:
        yield from leaves(derivation.left)
        yield from leaves(derivation.right)


def to_tree(derivation: Derivation) -> Tree:
    if isinstance(derivation, Leaf):
        return Tree(str(derivation.category), [derivation.token.surface])
    label = f"{derivation.category} {derivation.rule.value}"
    return Tree(label, [to_tree(derivation.left), to_tree(derivation.right)])


class ChartParser:
    """CKY over the six combinatory rules, keeping the best `beam` derivations per category per cell."""

    def __init__(self, lexicon: Lexicon, beam: int = DEFAULT_PARSE_BEAM):
        self.lexicon = lexicon
        self.beam = beam

    def parse(self, tokens: list[Token], k: int = 1) -> list[Derivation]:
        n = len(tokens)
        if n == 0:
            raise NoParse(tokens, [])
        chart: dict[tuple[int, int], dict[Category, list[Derivation]]] = {}
        for i, token in enumerate(tokens):
            cell: dict[Category, list[Derivation]] = {}
            for entry in self.lexicon.lookup(token.surface, token.feature):
                cell.setdefault(entry.category, []).append(Leaf(entry, token, i))
            chart[(i, i + 1)] = cell
        for width in range(2, n + 1):
            for start in range(0, n - width + 1):
                end = start + width
                cell = {}
                for split in range(start + 1, end):
                    self._fill(cell, chart[(start, split)], chart[(split, end)])
                for category, derivations in cell.items():
                    derivations.sort(key=rank_key)
                    del derivations[self.beam:]
                chart[(start, end)] = cell
        top = chart[(0, n)]
        results = [d for category, ds in top.items() if isinstance(category, Atomic)
                   and category.name == "S" for d in ds]
        if not results:
            raise NoParse(tokens, self._fragments(chart, n))
        results.sort(key=rank_key)
        logger.debug("Parsed %d tokens into %d sentence derivations", n, len(results))
        return results[:k]

    def _fill(self, cell, left_cell, right_cell) -> None:
        for left_category, left_derivations in left_cell.items():
            for right_category, right_derivations in right_cell.items():
                for rule in RULE_ORDER:
                    result = combine(rule, left_category, right_category)
                    if result is None:
                        continue
                    bucket = cell.setdefault(result, [])
                    for left in left_derivations:
                        for right in right_derivations:
                            bucket.append(make_node(rule, result, left, right))

    @staticmethod
    def _fragments(chart, n: int) -> list[str]:
        for width in range(n - 1, 0, -1):
            found = []
            for start in range(0, n - width + 1):
                for category in chart[(start, start + width)]:
                    found.append(f"{start}-{start + width}:{category}")
            if found:
                return found[:5]
        return []
