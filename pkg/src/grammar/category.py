import logging
import re
from dataclasses import dataclass
from enum import Enum

from src.core.system import EngineError

logger = logging.getLogger(__name__)

ATOMIC_NAMES: frozenset[str] = frozenset({"S", "NP", "N", "NUM"})


class CategoryError(EngineError):
    pass


@dataclass(frozen=True)
class Atomic:
    name: str
    features: frozenset[tuple[str, str]] = frozenset()

    def __str__(self) -> str:
        if not self.features:
            return self.name
        inside = ",".join(f"{k}={v}" for k, v in sorted(self.features))
        return f"{self.name}[{inside}]"


@dataclass(frozen=True)
class Functor:
    """`result/argument` (slash "/") or `result\\argument` (slash "\\")."""

    slash: str
    result: "Category"
    argument: "Category"

    def __str__(self) -> str:
        return f"{_wrap(self.result)}{self.slash}{_wrap(self.argument)}"


Category = Atomic | Functor


def _wrap(category: Category) -> str:
    return f"({category})" if isinstance(category, Functor) else str(category)


class Rule(Enum):
    FA = ">"
    BA = "<"
    FC = ">B"
    BC = "<B"
    FCX = ">Bx"
    BCX = "<Bx"

    @property
    def is_composition(self) -> bool:
        return self not in (Rule.FA, Rule.BA)

    @property
    def is_crossed(self) -> bool:
        return self in (Rule.FCX, Rule.BCX)


_CAT_TOKEN_RE = re.compile(r"\(|\)|/|\\|[A-Z]+(?:\[[^\]]*\])?")


def parse_category(text: str) -> Category:
    tokens = _CAT_TOKEN_RE.findall(text.replace(" ", ""))
    if "".join(tokens) != text.replace(" ", ""):
        raise CategoryError(f"malformed category {text!r}")
    category, position = _parse_slashes(tokens, 0)
    if position != len(tokens):
        raise CategoryError(f"trailing input in category {text!r}")
    return category


def _parse_slashes(tokens: list[str], position: int) -> tuple[Category, int]:
    left, position = _parse_primary(tokens, position)
    while position < len(tokens) and tokens[position] in ("/", "\\"):
        slash = tokens[position]
        right, position = _parse_primary(tokens, position + 1)
        left = Functor(slash, left, right)
    return left, position


def _parse_primary(tokens: list[str], position: int) -> tuple[Category, int]:
    if position >= len(tokens):
        raise CategoryError("unexpected end of category")
    token = tokens[position]
    if token == "(":
        inner, position = _parse_slashes(tokens, position + 1)
        if position >= len(tokens) or tokens[position] != ")":
            raise CategoryError("unbalanced parentheses in category")
        return inner, position + 1
    name, _, rest = token.partition("[")
    if name not in ATOMIC_NAMES:
        raise CategoryError(f"unknown atomic category {name!r}")
    features: set[tuple[str, str]] = set()
    for item in filter(None, rest.rstrip("]").split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise CategoryError(f"feature without value in {token!r}")
        features.add((key, value))
    return Atomic(name, frozenset(features)), position + 1


def unify(pattern: Category, actual: Category) -> bool:
    """Features unify when every key present on both sides carries the same value."""
    if isinstance(pattern, Atomic) and isinstance(actual, Atomic):
        if pattern.name != actual.name:
            return False
        mine, theirs = dict(pattern.features), dict(actual.features)
        return all(theirs[key] == value for key, value in mine.items() if key in theirs)
    if isinstance(pattern, Functor) and isinstance(actual, Functor):
        return (
            pattern.slash == actual.slash
            and unify(pattern.result, actual.result)
            and unify(pattern.argument, actual.argument)
        )
    return False


def combine(rule: Rule, left: Category, right: Category) -> Category | None:
    if rule is Rule.FA:
        if isinstance(left, Functor) and left.slash == "/" and unify(left.argument, right):
            return left.result
    elif rule is Rule.BA:
        if isinstance(right, Functor) and right.slash == "\\" and unify(right.argument, left):
            return right.result
    elif rule in (Rule.FC, Rule.FCX):
        inner_slash = "/" if rule is Rule.FC else "\\"
        if (
            isinstance(left, Functor) and left.slash == "/"
            and isinstance(right, Functor) and right.slash == inner_slash
            and unify(left.argument, right.result)
        ):
            return Functor(inner_slash, left.result, right.argument)
    elif rule in (Rule.BC, Rule.BCX):
        inner_slash = "\\" if rule is Rule.BC else "/"
        if (
            isinstance(right, Functor) and right.slash == "\\"
            and isinstance(left, Functor) and left.slash == inner_slash
            and unify(right.argument, left.result)
        ):
            return Functor(inner_slash, right.result, left.argument)
    return None
