"""First-order clauses with degree terms, and clausification of formulas.

Degree terms are `FShift(base, offset)`; unification works modulo
offsets, so `X + 2` unifies with `b + 5` by binding `X := b + 3`.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, TypeAlias

from src.logic.terms import (
    EQUALITY, TRUE, Application, ArithAtom, Connective, Constant, DegreeExpr, Formula,
    Quantifier, Term, Variable, spine, substitute,
)
from src.prover.arith import Offset, UnsupportedAtom

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FFun:
    name: str
    args: tuple["FTerm", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class FShift:
    base: "FTerm"
    offset: Offset
    negated: bool = False

    def __str__(self) -> str:
        base = f"-{self.base}" if self.negated else str(self.base)
        return f"{base}+[{self.offset}]"


FTerm: TypeAlias = FVar | FFun | FShift

ZERO = FFun("0")


def shift(base: FTerm, offset: Offset, negated: bool = False) -> FTerm:
    if isinstance(base, FShift):
        inner = base.offset if not negated else -base.offset
        return shift(base.base, inner + offset, base.negated != negated)
    if base == ZERO:
        negated = False
    if not offset and not negated:
        return base
    return FShift(base, offset, negated)


def split_shift(term: FTerm) -> tuple[FTerm, Offset]:
    if isinstance(term, FShift) and not term.negated:
        return term.base, term.offset
    return term, Offset()


@dataclass(frozen=True)
class PredAtom:
    pred: str
    args: tuple[FTerm, ...]

    def __str__(self) -> str:
        return f"{self.pred}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class ArithAtomF:
    """`lhs op rhs` with op in gt, ge, eq."""

    op: str
    lhs: FTerm
    rhs: FTerm

    def __str__(self) -> str:
        return f"{self.op}({self.lhs},{self.rhs})"


Atom: TypeAlias = PredAtom | ArithAtomF


@dataclass(frozen=True)
class Lit:
    positive: bool
    atom: Atom

    def negate(self) -> "Lit":
        return Lit(not self.positive, self.atom)

    @property
    def is_arith(self) -> bool:
        return isinstance(self.atom, ArithAtomF)

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"~{self.atom}"


@dataclass(frozen=True)
class Clause:
    literals: tuple[Lit, ...]

    @classmethod
    def of(cls, literals: Iterable[Lit]) -> "Clause":
        unique = {str(lit): lit for lit in literals}
        return cls(tuple(unique[key] for key in sorted(unique)))

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def __len__(self) -> int:
        return len(self.literals)

    def __str__(self) -> str:
        return " | ".join(map(str, self.literals)) if self.literals else "[]"


ClauseSet: TypeAlias = list[Clause]

# Substitutions


Subst: TypeAlias = dict[str, FTerm]


def walk(term: FTerm, subst: Subst) -> FTerm:
    while isinstance(term, FVar) and term.name in subst:
        term = subst[term.name]
    if isinstance(term, FShift):
        base = walk(term.base, subst)
        if base is not term.base:
            return shift(base, term.offset, term.negated)
    return term


def apply_subst(term: FTerm, subst: Subst) -> FTerm:
    term = walk(term, subst)
    if isinstance(term, FFun) and term.args:
        return FFun(term.name, tuple(apply_subst(a, subst) for a in term.args))
    if isinstance(term, FShift):
        return shift(apply_subst(term.base, subst), term.offset, term.negated)
    return term


def apply_atom(atom: Atom, subst: Subst) -> Atom:
    if isinstance(atom, PredAtom):
        return PredAtom(atom.pred, tuple(apply_subst(a, subst) for a in atom.args))
    return ArithAtomF(atom.op, apply_subst(atom.lhs, subst), apply_subst(atom.rhs, subst))


def apply_clause(literals: Iterable[Lit], subst: Subst) -> list[Lit]:
    return [Lit(lit.positive, apply_atom(lit.atom, subst)) for lit in literals]


def term_vars(term: FTerm) -> set[str]:
    if isinstance(term, FVar):
        return {term.name}
    if isinstance(term, FFun):
        return set().union(*(term_vars(a) for a in term.args)) if term.args else set()
    return term_vars(term.base)


def atom_vars(atom: Atom) -> set[str]:
    args = atom.args if isinstance(atom, PredAtom) else (atom.lhs, atom.rhs)
    return set().union(*(term_vars(a) for a in args)) if args else set()


def clause_vars(clause: Clause) -> set[str]:
    return set().union(*(atom_vars(lit.atom) for lit in clause.literals)) if clause.literals else set()


def _occurs(name: str, term: FTerm, subst: Subst) -> bool:
    term = walk(term, subst)
    if isinstance(term, FVar):
        return term.name == name
    if isinstance(term, FFun):
        return any(_occurs(name, a, subst) for a in term.args)
    return _occurs(name, term.base, subst)


def unify(left: FTerm, right: FTerm, subst: Subst) -> Subst | None:
    """Most general unifier extending `subst`, or None."""
    left, right = walk(left, subst), walk(right, subst)
    if left == right:
        return subst
    if isinstance(left, FShift) or isinstance(right, FShift):
        if (isinstance(left, FShift) and left.negated) or (isinstance(right, FShift) and right.negated):
            return None
        lbase, loff = split_shift(left)
        rbase, roff = split_shift(right)
        if isinstance(lbase, FVar) and lbase == rbase:
            return subst if loff == roff else None
        if isinstance(lbase, FVar):
            return _bind(lbase.name, shift(rbase, roff - loff), subst)
        if isinstance(rbase, FVar):
            return _bind(rbase.name, shift(lbase, loff - roff), subst)
        if loff != roff:
            return None
        return unify(lbase, rbase, subst)
    if isinstance(left, FVar):
        return _bind(left.name, right, subst)
    if isinstance(right, FVar):
        return _bind(right.name, left, subst)
    if left.name != right.name or len(left.args) != len(right.args):
        return None
    for a, b in zip(left.args, right.args):
        subst = unify(a, b, subst)
        if subst is None:
            return None
    return subst


def _bind(name: str, value: FTerm, subst: Subst) -> Subst | None:
    if value == FVar(name):
        return subst
    if _occurs(name, value, subst):
        return None
    extended = dict(subst)
    extended[name] = value
    return extended


def unify_atoms(left: Atom, right: Atom, subst: Subst | None = None) -> Subst | None:
    subst = {} if subst is None else subst
    if isinstance(left, PredAtom) and isinstance(right, PredAtom):
        if left.pred != right.pred or len(left.args) != len(right.args):
            return None
        for a, b in zip(left.args, right.args):
            subst = unify(a, b, subst)
            if subst is None:
                return None
        return subst
    if isinstance(left, ArithAtomF) and isinstance(right, ArithAtomF) and left.op == right.op:
        subst = unify(left.lhs, right.lhs, subst)
        return None if subst is None else unify(left.rhs, right.rhs, subst)
    return None


def rename_clause(clause: Clause, suffix: str) -> list[Lit]:
    mapping: Subst = {name: FVar(f"{name}_{suffix}") for name in clause_vars(clause)}
    return apply_clause(clause.literals, mapping)


def canonical_variant(literals: Iterable[Lit]) -> Clause:
    """Renames variables to V0, V1, ... in order of first appearance."""
    clause = Clause.of(literals)
    order: list[str] = []
    for lit in clause.literals:
        for name in sorted(atom_vars(lit.atom)):
            if name not in order:
                order.append(name)
    mapping: Subst = {name: FVar(f"V{i}") for i, name in enumerate(order)}
    return Clause.of(apply_clause(clause.literals, mapping))


# Clausification


@dataclass
class SkolemNamer:
    prefix: str = "sk"
    _counter: itertools.count = field(default_factory=lambda: itertools.count(1))

    def fresh(self, stem: str) -> str:
        return f"{self.prefix}_{stem}{next(self._counter)}"


_FALSE = Connective("not", (TRUE,))


def clausify(formula: Formula, namer: SkolemNamer | None = None) -> ClauseSet:
    """NNF, prenex form, Skolemization and CNF of a closed formula."""
    namer = namer or SkolemNamer()
    nnf = _nnf(formula, positive=True)
    prefix, matrix = _prenex(nnf)
    env: dict[str, FTerm] = {}
    universals: list[FVar] = []
    for q, var, stem in prefix:
        if q == "forall":
            fresh = FVar(var)
            universals.append(fresh)
            env[var] = fresh
        else:
            env[var] = FFun(namer.fresh(stem), tuple(universals))
    clauses = [Clause.of(lits) for lits in _cnf(matrix, env)]
    logger.debug("Clausified into %d clauses", len(clauses))
    return clauses


def _nnf(f: Term, positive: bool) -> Term:
    if isinstance(f, Connective):
        op, args = f.op, f.args
        if op == "not":
            return _nnf(args[0], not positive)
        if op == "implies":
            return _nnf(Connective("or", (Connective("not", (args[0],)), args[1])), positive)
        if op == "iff":
            a, b = args
            expanded = Connective("and", (
                Connective("or", (Connective("not", (a,)), b)),
                Connective("or", (a, Connective("not", (b,)))),
            ))
            return _nnf(expanded, positive)
        new_op = op if positive else ("or" if op == "and" else "and")
        return Connective(new_op, tuple(_nnf(a, positive) for a in args))
    if isinstance(f, Quantifier):
        q = f.q if positive else ("exists" if f.q == "forall" else "forall")
        return Quantifier(q, f.var, f.sort, _nnf(f.body, positive))
    if f == TRUE:
        return TRUE if positive else _FALSE
    return f if positive else Connective("not", (f,))


def _prenex(f: Term) -> tuple[list[tuple[str, str, str]], Term]:
    counter = itertools.count(1)

    def go(t: Term, env: dict[str, str]) -> tuple[list[tuple[str, str, str]], Term]:
        if isinstance(t, Quantifier):
            stem = {"degree": "d", "event": "e"}.get(t.sort, "x")
            name = f"{stem.upper()}{next(counter)}"
            prefix, matrix = go(t.body, {**env, t.var: name})
            return [(t.q, name, stem)] + prefix, matrix
        if isinstance(t, Connective) and t.op in ("and", "or"):
            prefix: list[tuple[str, str, str]] = []
            parts = []
            for arg in t.args:
                p, m = go(arg, env)
                prefix += p
                parts.append(m)
            return prefix, Connective(t.op, tuple(parts))
        return [], _rename_free(t, env)

    return go(f, {})


def _rename_free(t: Term, env: dict[str, str]) -> Term:
    for old, new in env.items():
        t = substitute(t, old, Variable(new))
    return t


def _cnf(f: Term, env: dict[str, FTerm]) -> list[list[Lit]]:
    if isinstance(f, Connective) and f.op == "and":
        result: list[list[Lit]] = []
        for arg in f.args:
            result += _cnf(arg, env)
        return result
    if isinstance(f, Connective) and f.op == "or":
        result = [[]]
        for arg in f.args:
            part = _cnf(arg, env)
            result = [left + right for left in result for right in part]
        return result
    if f == TRUE:
        return []
    if f == _FALSE:
        return [[]]
    if isinstance(f, Connective) and f.op == "not":
        return [[Lit(False, convert_atom(f.args[0], env))]]
    return [[Lit(True, convert_atom(f, env))]]


def convert_atom(t: Term, env: dict[str, FTerm]) -> Atom:
    if isinstance(t, ArithAtom):
        lhs, rhs = convert_term(t.lhs, env), convert_term(t.rhs, env)
        if t.op == "lt":
            return ArithAtomF("gt", rhs, lhs)
        if t.op == "le":
            return ArithAtomF("ge", rhs, lhs)
        return ArithAtomF(t.op, lhs, rhs)
    head, args = spine(t)
    if isinstance(head, Constant) and args:
        name = EQUALITY if head.name == EQUALITY else head.name
        return PredAtom(name, tuple(convert_term(a, env) for a in args))
    if isinstance(head, Constant):
        return PredAtom(head.name, ())
    raise UnsupportedAtom(f"cannot read {t} as an atom")


def convert_term(t: Term, env: dict[str, FTerm]) -> FTerm:
    if isinstance(t, Variable):
        if t.name not in env:
            raise UnsupportedAtom(f"unbound variable {t.name}")
        return env[t.name]
    if isinstance(t, Constant):
        return FFun(t.name)
    if isinstance(t, DegreeExpr):
        base = ZERO if t.base is None else convert_term(t.base, env)
        margins: dict[str, Fraction] = {}
        for margin, coef in t.margins:
            if not isinstance(margin, Constant):
                raise UnsupportedAtom(f"margin {margin} is not a constant")
            margins[margin.name] = margins.get(margin.name, Fraction(0)) + coef
        return shift(base, Offset.of(t.offset, margins), t.negated_scale)
    if isinstance(t, Application):
        head, args = spine(t)
        if isinstance(head, Constant):
            return FFun(head.name, tuple(convert_term(a, env) for a in args))
    raise UnsupportedAtom(f"cannot read {t} as a first-order term")
