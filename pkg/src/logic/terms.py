"""Typed lambda terms for compositional semantics.

Terms are immutable and hashable. Structural equality (`==`) is exact;
use `alpha_eq` to compare up to renaming of bound variables.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, TypeAlias

from src.core.system import EngineError

logger = logging.getLogger(__name__)

CONNECTIVES: frozenset[str] = frozenset({"and", "or", "implies", "iff", "not"})
QUANTIFIERS: frozenset[str] = frozenset({"forall", "exists"})
ARITH_OPS: frozenset[str] = frozenset({"gt", "ge", "lt", "le", "eq"})
SORTS: frozenset[str] = frozenset({"entity", "degree", "event"})
CONSTANT_KINDS: frozenset[str] = frozenset(
    {"entity", "degree", "event", "predicate", "numeral", "theta", "delta", "function", "truth"}
)

EQUALITY: str = "="


class TermError(EngineError):
    pass


class NonTerminating(TermError):
    def __init__(self, steps: int):
        super().__init__(f"normalization exceeded {steps} reduction steps")
        self.steps = steps


class ResidualLambda(TermError):
    def __init__(self, fragment: str):
        super().__init__(f"abstraction or ill-typed application left in formula: {fragment}")
        self.fragment = fragment


class OpenFormula(TermError):
    def __init__(self, names: list[str]):
        super().__init__(f"formula has free variables: {', '.join(names)}")
        self.names = names


class PairNotAllowed(TermError):
    pass


class Term:
    __slots__ = ()

    def __str__(self) -> str:
        from src.logic.syntax import format_term
        return format_term(self)


@dataclass(frozen=True)
class Variable(Term):
    name: str


@dataclass(frozen=True)
class Constant(Term):
    name: str
    kind: str = field(default="entity", compare=False)


@dataclass(frozen=True)
class Abstraction(Term):
    param: str
    body: Term


@dataclass(frozen=True)
class Application(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True)
class Connective(Term):
    op: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Quantifier(Term):
    q: str
    var: str
    sort: str
    body: Term


@dataclass(frozen=True)
class DegreeExpr(Term):
    """`(negated_scale ? -base : base) + offset + sum(coef * margin)`; base None means 0."""

    base: Term | None
    offset: Fraction = Fraction(0)
    negated_scale: bool = False
    margins: tuple[tuple[Term, Fraction], ...] = ()


@dataclass(frozen=True)
class ArithAtom(Term):
    op: str
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Pair(Term):
    at_issue: Term
    presupposition: Term


LambdaTerm: TypeAlias = Term
Formula: TypeAlias = Term

TRUE = Constant("TRUE", "truth")
THETA = Constant("theta", "theta")
DELTA = Constant("delta", "delta")


def numeral(value: Fraction | int | str) -> DegreeExpr:
    return DegreeExpr(None, Fraction(value))


def apply(fun: Term, *args: Term) -> Term:
    result = fun
    for arg in args:
        result = Application(result, arg)
    return result


def lam(params: str, body: Term) -> Term:
    for param in reversed(params.split()):
        body = Abstraction(param, body)
    return body


def conj(*args: Term) -> Term:
    parts: list[Term] = []
    for arg in args:
        if isinstance(arg, Connective) and arg.op == "and":
            parts.extend(arg.args)
        elif arg != TRUE:
            parts.append(arg)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return Connective("and", tuple(parts))


def neg(arg: Term) -> Term:
    return Connective("not", (arg,))


def equals(lhs: Term, rhs: Term) -> Term:
    return apply(Constant(EQUALITY, "predicate"), lhs, rhs)


def spine(term: Term) -> tuple[Term, list[Term]]:
    """Splits a curried application into its head and argument list."""
    args: list[Term] = []
    while isinstance(term, Application):
        args.append(term.arg)
        term = term.fun
    args.reverse()
    return term, args


def children(term: Term) -> Iterator[Term]:
    if isinstance(term, Abstraction):
        yield term.body
    elif isinstance(term, Application):
        yield term.fun
        yield term.arg
    elif isinstance(term, Connective):
        yield from term.args
    elif isinstance(term, Quantifier):
        yield term.body
    elif isinstance(term, DegreeExpr):
        if term.base is not None:
            yield term.base
        for margin, _ in term.margins:
            yield margin
    elif isinstance(term, ArithAtom):
        yield term.lhs
        yield term.rhs
    elif isinstance(term, Pair):
        yield term.at_issue
        yield term.presupposition


def subterms(term: Term) -> Iterator[Term]:
    stack = [term]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(list(children(current))))


def free_vars(term: Term) -> frozenset[str]:
    if isinstance(term, Variable):
        return frozenset({term.name})
    if isinstance(term, Abstraction):
        return free_vars(term.body) - {term.param}
    if isinstance(term, Quantifier):
        return free_vars(term.body) - {term.var}
    result: frozenset[str] = frozenset()
    for child in children(term):
        result |= free_vars(child)
    return result


def bound_names(term: Term) -> set[str]:
    names: set[str] = set()
    for sub in subterms(term):
        if isinstance(sub, Abstraction):
            names.add(sub.param)
        elif isinstance(sub, Quantifier):
            names.add(sub.var)
    return names


def fresh_name(base: str, avoid: set[str] | frozenset[str]) -> str:
    stem = base.rstrip("0123456789") or "v"
    for i in itertools.count(1):
        candidate = f"{stem}{i}"
        if candidate not in avoid:
            return candidate
    raise AssertionError("unreachable")


def substitute(term: Term, name: str, value: Term) -> Term:
    """Capture-avoiding substitution `term[name := value]`."""
    return _subst(term, name, value, free_vars(value))


def _subst(term: Term, name: str, value: Term, value_fv: frozenset[str]) -> Term:
    if isinstance(term, Variable):
        return value if term.name == name else term
    if isinstance(term, Constant):
        return term
    if isinstance(term, (Abstraction, Quantifier)):
        binder = term.param if isinstance(term, Abstraction) else term.var
        if binder == name:
            return term
        body = term.body
        if name not in free_vars(body):
            return term
        if binder in value_fv:
            new_binder = fresh_name(binder, value_fv | free_vars(body) | {name})
            body = _subst(body, binder, Variable(new_binder), frozenset({new_binder}))
            binder = new_binder
        body = _subst(body, name, value, value_fv)
        if isinstance(term, Abstraction):
            return Abstraction(binder, body)
        return Quantifier(term.q, binder, term.sort, body)
    if isinstance(term, Application):
        return Application(_subst(term.fun, name, value, value_fv), _subst(term.arg, name, value, value_fv))
    if isinstance(term, Connective):
        return Connective(term.op, tuple(_subst(a, name, value, value_fv) for a in term.args))
    if isinstance(term, DegreeExpr):
        base = None if term.base is None else _subst(term.base, name, value, value_fv)
        margins = tuple((_subst(m, name, value, value_fv), c) for m, c in term.margins)
        return DegreeExpr(base, term.offset, term.negated_scale, margins)
    if isinstance(term, ArithAtom):
        return ArithAtom(term.op, _subst(term.lhs, name, value, value_fv), _subst(term.rhs, name, value, value_fv))
    if isinstance(term, Pair):
        return Pair(
            _subst(term.at_issue, name, value, value_fv),
            _subst(term.presupposition, name, value, value_fv),
        )
    raise TypeError(f"not a term: {term!r}")


def alpha_eq(left: Term, right: Term) -> bool:
    return _alpha(left, right, {}, {}, 0)


def _alpha(a: Term, b: Term, env_a: dict[str, int], env_b: dict[str, int], depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Variable):
        ia, ib = env_a.get(a.name), env_b.get(b.name)
        if ia is None and ib is None:
            return a.name == b.name
        return ia == ib
    if isinstance(a, Constant):
        return a.name == b.name
    if isinstance(a, (Abstraction, Quantifier)):
        if isinstance(a, Quantifier) and (a.q != b.q or a.sort != b.sort):
            return False
        pa = a.param if isinstance(a, Abstraction) else a.var
        pb = b.param if isinstance(b, Abstraction) else b.var
        return _alpha(a.body, b.body, {**env_a, pa: depth}, {**env_b, pb: depth}, depth + 1)
    if isinstance(a, Connective):
        if a.op != b.op or len(a.args) != len(b.args):
            return False
        return all(_alpha(x, y, env_a, env_b, depth) for x, y in zip(a.args, b.args))
    if isinstance(a, DegreeExpr):
        if a.offset != b.offset or a.negated_scale != b.negated_scale or len(a.margins) != len(b.margins):
            return False
        if (a.base is None) != (b.base is None):
            return False
        if a.base is not None and not _alpha(a.base, b.base, env_a, env_b, depth):
            return False
        return all(
            ca == cb and _alpha(ma, mb, env_a, env_b, depth)
            for (ma, ca), (mb, cb) in zip(a.margins, b.margins)
        )
    if isinstance(a, ArithAtom) and a.op != b.op:
        return False
    return all(_alpha(x, y, env_a, env_b, depth) for x, y in zip(children(a), children(b)))


def contains(term: Term, kind: type) -> bool:
    return any(isinstance(sub, kind) for sub in subterms(term))


def extract_formula(term: Term) -> Formula:
    """Checks that a normalized term is a closed first-order formula.

    Pairs must be split (see `MultiSem`) before calling this.
    """
    for sub in subterms(term):
        if isinstance(sub, Pair):
            raise PairNotAllowed("split the presupposition pair before extracting a formula")
        if isinstance(sub, Abstraction):
            raise ResidualLambda(_snippet(sub))
        if isinstance(sub, Application):
            head, _ = spine(sub)
            if not isinstance(head, Constant):
                raise ResidualLambda(_snippet(sub))
    names = sorted(free_vars(term))
    if names:
        raise OpenFormula(names)
    return term


def _snippet(term: Term, limit: int = 120) -> str:
    text = str(term)
    return text if len(text) <= limit else text[: limit - 3] + "..."
