"""Finite-model oracle: grounds a closed formula over small carriers and asks a SAT solver.

Entity constants denote distinct elements of an `n`-element domain.
Degree quantifiers range over a grid of at most `m` rational points built
around the numerals of the formula, plus the points theta - delta, theta
and theta + delta of every threshold constant. Thresholds are placed on
each candidate position in turn; delta is fixed to a quarter.
"""
import itertools
import logging
from fractions import Fraction
from typing import Iterator

from pysat.formula import IDPool
from pysat.solvers import Solver

from src.core.config import ORACLE_DELTA_VALUE, ORACLE_MAX_DEGREE_POINTS, ORACLE_MAX_ENTITIES
from src.core.system import EngineError
from src.logic.terms import (
    EQUALITY, TRUE, Application, ArithAtom, Connective, Constant, DegreeExpr, Formula,
    Quantifier, Term, Variable, spine, subterms,
)

logger = logging.getLogger(__name__)

DELTA_VALUE = Fraction(ORACLE_DELTA_VALUE)
Value = Fraction | str
Lit = int | bool


class TooLarge(EngineError):
    pass


def _is_theta(c: Constant) -> bool:
    return c.name == "theta" or c.name.startswith("theta_")


def _is_delta(c: Constant) -> bool:
    return c.name == "delta" or c.name.startswith("delta_")


def entity_constants(formula: Formula) -> list[str]:
    names = {
        sub.name for sub in subterms(formula)
        if isinstance(sub, Constant) and sub.kind == "entity" and sub != TRUE
    }
    return sorted(names)


def threshold_constants(formula: Formula) -> list[str]:
    return sorted({sub.name for sub in subterms(formula) if isinstance(sub, Constant) and _is_theta(sub)})


def degree_grid(formula: Formula, points: int) -> list[Fraction]:
    """The numerals of the formula, padded with points below, above and between them."""
    numerals = sorted({
        sub.offset for sub in subterms(formula)
        if isinstance(sub, DegreeExpr) and sub.base is None and not sub.margins
    })
    if len(numerals) > points:
        raise TooLarge(f"{len(numerals)} numerals exceed the degree grid of {points}")
    grid = list(numerals) or [Fraction(0)]
    low = True
    while len(grid) < points:
        grid.append(grid[0] - 1 if low else grid[-1] + 1)
        grid.sort()
        low = not low
    return grid


def _threshold_positions(grid: list[Fraction]) -> list[Fraction]:
    middles = [(a + b) / 2 for a, b in zip(grid, grid[1:])]
    return sorted(set(grid) | set(middles))


class _Grounder:
    def __init__(self, entities: dict[str, str], domain: list[str], thresholds: dict[str, Fraction], carrier: list[Fraction]):
        self.entities = entities
        self.domain = domain
        self.thresholds = thresholds
        self.carrier = carrier
        self.pool = IDPool()
        self.clauses: list[list[int]] = []
        self._aux = itertools.count()

    def value(self, t: Term, env: dict[str, Value]) -> Value:
        if isinstance(t, Variable):
            return env[t.name]
        if isinstance(t, Constant):
            if _is_theta(t):
                return self.thresholds[t.name]
            if _is_delta(t):
                return DELTA_VALUE
            if t.name in self.entities:
                return self.entities[t.name]
            raise TooLarge(f"constant {t.name} has no finite interpretation")
        if isinstance(t, DegreeExpr):
            base = Fraction(0) if t.base is None else self.value(t.base, env)
            if not isinstance(base, Fraction):
                raise TooLarge(f"entity {base} used as a degree")
            total = (-base if t.negated_scale else base) + t.offset
            for margin, coef in t.margins:
                total += coef * self.value(margin, env)
            return total
        raise TooLarge(f"function term {t} is outside the oracle fragment")

    def _aux_var(self) -> int:
        return self.pool.id(("aux", next(self._aux)))

    def _gate(self, op: str, parts: list[Lit]) -> Lit:
        absorbing = op == "or"
        if any(p is absorbing for p in parts):
            return absorbing
        lits = [p for p in parts if not isinstance(p, bool)]
        if not lits:
            return not absorbing
        if len(lits) == 1:
            return lits[0]
        out = self._aux_var()
        if op == "and":
            self.clauses += [[-out, lit] for lit in lits]
            self.clauses.append([out] + [-lit for lit in lits])
        else:
            self.clauses += [[out, -lit] for lit in lits]
            self.clauses.append([-out] + lits)
        return out

    @staticmethod
    def _neg(lit: Lit) -> Lit:
        return (not lit) if isinstance(lit, bool) else -lit

    def encode(self, f: Term, env: dict[str, Value]) -> Lit:
        if f == TRUE:
            return True
        if isinstance(f, Connective):
            if f.op == "not":
                return self._neg(self.encode(f.args[0], env))
            parts = [self.encode(a, env) for a in f.args]
            if f.op in ("and", "or"):
                return self._gate(f.op, parts)
            a, b = parts
            if f.op == "implies":
                return self._gate("or", [self._neg(a), b])
            return self._gate("and", [self._gate("or", [self._neg(a), b]), self._gate("or", [a, self._neg(b)])])
        if isinstance(f, Quantifier):
            parts = [self.encode(f.body, {**env, f.var: v}) for v in self._range(f.sort)]
            return self._gate("and" if f.q == "forall" else "or", parts)
        if isinstance(f, ArithAtom):
            lhs, rhs = self.value(f.lhs, env), self.value(f.rhs, env)
            return {"gt": lhs > rhs, "ge": lhs >= rhs, "lt": lhs < rhs, "le": lhs <= rhs, "eq": lhs == rhs}[f.op]
        head, args = spine(f)
        if not isinstance(head, Constant):
            raise TooLarge(f"cannot ground {f}")
        for arg in args:
            if isinstance(arg, DegreeExpr) and isinstance(arg.base, Variable) and (arg.offset or arg.margins):
                raise TooLarge(f"shifted bound degree {arg} may leave the finite carrier")
        values = tuple(self.value(a, env) for a in args)
        if head.name == EQUALITY:
            return values[0] == values[1]
        return self.pool.id((head.name, values))

    def _range(self, sort: str) -> list[Value]:
        if sort == "entity":
            return list(self.domain)
        if sort == "degree":
            return list(self.carrier)
        raise TooLarge(f"quantification over {sort} is outside the oracle fragment")


def _interpretations(formula: Formula, entities: int, degree_points: int) -> Iterator[_Grounder]:
    if entities < 1 or degree_points < 1:
        raise TooLarge(f"bounds n={entities}, m={degree_points} leave an empty carrier")
    if entities > ORACLE_MAX_ENTITIES or degree_points > ORACLE_MAX_DEGREE_POINTS:
        raise TooLarge(f"bounds n={entities}, m={degree_points} exceed the oracle limits")
    names = entity_constants(formula)
    if len(names) > entities:
        raise TooLarge(f"{len(names)} entity constants need more than {entities} elements")
    for sub in subterms(formula):
        if isinstance(sub, Constant) and sub.kind in ("function", "event"):
            raise TooLarge(f"{sub.name} is outside the oracle fragment")
        if isinstance(sub, Application) and isinstance(sub.fun, Constant) and sub.fun.kind == "function":
            raise TooLarge(f"{sub.fun.name} is outside the oracle fragment")
    domain = [f"e{i}" for i in range(entities)]
    mapping = dict(zip(names, domain))
    grid = degree_grid(formula, degree_points)
    thetas = threshold_constants(formula)
    for placement in itertools.product(_threshold_positions(grid), repeat=len(thetas)):
        assigned = dict(zip(thetas, placement))
        extra = {p + s * DELTA_VALUE for p in placement for s in (-1, 0, 1)}
        yield _Grounder(mapping, domain, assigned, sorted(set(grid) | extra))


def model_check(formula: Formula, entities: int = 3, degree_points: int = 4) -> bool:
    """True when the closed formula has a model within the given bounds.

    Raises TooLarge when the bounds exceed the oracle limits or the formula
    mentions events, role functions or more constants than elements.
    """
    for tried, grounder in enumerate(_interpretations(formula, entities, degree_points), start=1):
        root = grounder.encode(formula, {})
        if root is False:
            continue
        if root is True:
            return True
        with Solver(name="m22", bootstrap_with=grounder.clauses + [[root]]) as solver:
            if solver.solve():
                logger.debug("Model found at threshold placement %d: %s", tried, grounder.thresholds)
                return True
    return False
