"""Difference-constraint arithmetic over rationals extended by margins.

An `Offset` is `value + sum(coef * delta_s)` where every delta_s is a
positive infinitesimal: offsets compare by rational value first, then
by margin coefficients in scale-name order.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal

from src.core.system import EngineError

logger = logging.getLogger(__name__)

ArithVerdict = Literal["sat", "unsat"]


class UnsupportedAtom(EngineError):
    pass


@dataclass(frozen=True)
class Offset:
    value: Fraction = Fraction(0)
    margins: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def of(cls, value: Fraction | int = 0, margins: dict[str, Fraction] | None = None) -> "Offset":
        items = tuple(sorted((k, Fraction(v)) for k, v in (margins or {}).items() if v))
        return cls(Fraction(value), items)

    def __add__(self, other: "Offset") -> "Offset":
        merged = dict(self.margins)
        for name, coef in other.margins:
            merged[name] = merged.get(name, Fraction(0)) + coef
        return Offset.of(self.value + other.value, merged)

    def __neg__(self) -> "Offset":
        return Offset(-self.value, tuple((k, -c) for k, c in self.margins))

    def __sub__(self, other: "Offset") -> "Offset":
        return self + (-other)

    def __bool__(self) -> bool:
        return bool(self.value) or bool(self.margins)

    def sign(self) -> int:
        if self.value:
            return 1 if self.value > 0 else -1
        for _, coef in self.margins:
            if coef:
                return 1 if coef > 0 else -1
        return 0

    def __str__(self) -> str:
        parts = [str(self.value)] if self.value or not self.margins else []
        parts += [f"{c}*{k}" for k, c in self.margins]
        return "+".join(parts)


ZERO_OFFSET = Offset()


@dataclass(frozen=True)
class Bound:
    """Path weight in the constraint graph; `strict` counts strict edges (each worth -epsilon)."""

    offset: Offset = ZERO_OFFSET
    strict: int = 0

    def __add__(self, other: "Bound") -> "Bound":
        return Bound(self.offset + other.offset, self.strict + other.strict)

    def sign(self) -> int:
        s = self.offset.sign()
        if s:
            return s
        if self.strict:
            return -1 if self.strict > 0 else 1
        return 0

    def __lt__(self, other: "Bound") -> bool:
        difference = Bound(self.offset - other.offset, self.strict - other.strict)
        return difference.sign() < 0


@dataclass(frozen=True)
class DiffConstraint:
    """`x - y <= bound` (or `<` when strict); `None` names the zero point."""

    x: object
    y: object
    bound: Offset
    strict: bool


def decide_constraints(constraints: Iterable[DiffConstraint]) -> ArithVerdict:
    """Bellman-Ford negative-cycle check on `x - y <= c` constraints.

    An edge y -> x carries weight c; the system is unsatisfiable exactly
    when some cycle has negative total weight, counting each strict edge
    as an infinitesimal below its bound.
    """
    edges: list[tuple[object, object, Bound]] = []
    nodes: set[object] = set()
    for c in constraints:
        weight = Bound(c.bound, 1 if c.strict else 0)
        if c.x == c.y:
            if weight.sign() < 0:
                return "unsat"
            continue
        edges.append((c.y, c.x, weight))
        nodes.update((c.x, c.y))
    distance: dict[object, Bound] = {node: Bound() for node in nodes}
    for _ in range(len(nodes)):
        changed = False
        for source, target, weight in edges:
            candidate = distance[source] + weight
            if candidate < distance[target]:
                distance[target] = candidate
                changed = True
        if not changed:
            return "sat"
    for source, target, weight in edges:
        if distance[source] + weight < distance[target]:
            return "unsat"
    return "sat"
