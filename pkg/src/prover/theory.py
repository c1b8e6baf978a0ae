import logging
from typing import Iterable

from src.prover.arith import ArithVerdict, DiffConstraint, UnsupportedAtom, decide_constraints
from src.prover.clauses import ArithAtomF, FShift, FTerm, Lit, split_shift

logger = logging.getLogger(__name__)


def _parts(term: FTerm):
    if isinstance(term, FShift) and term.negated:
        raise UnsupportedAtom(f"negated scale term {term} is outside difference logic")
    return split_shift(term)


def literal_constraints(lit: Lit) -> list[list[DiffConstraint]]:
    """Alternatives (a disjunction) of constraint conjunctions equivalent to `lit`."""
    atom = lit.atom
    if not isinstance(atom, ArithAtomF):
        raise UnsupportedAtom(f"{atom} is not an arithmetic atom")
    lb, lo = _parts(atom.lhs)
    rb, ro = _parts(atom.rhs)
    # lhs > rhs  <=>  rb - lb < lo - ro ;  lhs < rhs  <=>  lb - rb < ro - lo
    greater = DiffConstraint(rb, lb, lo - ro, True)
    greater_eq = DiffConstraint(rb, lb, lo - ro, False)
    less = DiffConstraint(lb, rb, ro - lo, True)
    less_eq = DiffConstraint(lb, rb, ro - lo, False)
    if atom.op == "gt":
        return [[greater]] if lit.positive else [[less_eq]]
    if atom.op == "ge":
        return [[greater_eq]] if lit.positive else [[less]]
    if atom.op == "eq":
        return [[greater_eq, less_eq]] if lit.positive else [[greater], [less]]
    raise UnsupportedAtom(f"unknown comparison {atom.op}")


def decide_arith(literals: Iterable[Lit]) -> ArithVerdict:
    """Satisfiability of a conjunction of ground comparison literals over the rationals."""
    fixed: list[DiffConstraint] = []
    choices: list[list[list[DiffConstraint]]] = []
    for lit in literals:
        alternatives = literal_constraints(lit)
        if len(alternatives) == 1:
            fixed.extend(alternatives[0])
        else:
            choices.append(alternatives)
    return _search(fixed, choices)


def _search(fixed: list[DiffConstraint], choices: list[list[list[DiffConstraint]]]) -> ArithVerdict:
    if decide_constraints(fixed) == "unsat":
        return "unsat"
    if not choices:
        return "sat"
    first, rest = choices[0], choices[1:]
    for alternative in first:
        if _search(fixed + alternative, rest) == "sat":
            return "sat"
    return "unsat"
