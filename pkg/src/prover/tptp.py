"""Typed first-order (TFF) export of problems for external theorem provers."""
import logging
import re
from fractions import Fraction
from typing import Iterable

from src.logic.terms import (
    EQUALITY, TRUE, ArithAtom, Connective, Constant, DegreeExpr, Formula, Quantifier, Term,
    Variable, spine,
)
from src.prover.arith import UnsupportedAtom

logger = logging.getLogger(__name__)

RAT = "$rat"
SORT_TYPES = {"entity": "entity", "event": "event", "degree": RAT}
ARITH_PREDICATES = {"gt": "$greater", "ge": "$greatereq", "lt": "$less", "le": "$lesseq"}
BINARY = {"and": "&", "or": "|", "implies": "=>", "iff": "<=>"}

_SYMBOL_RE = re.compile(r"[^a-z0-9_]")


def symbol(name: str) -> str:
    cleaned = _SYMBOL_RE.sub("_", name.lower())
    if not cleaned or not cleaned[0].isalpha():
        cleaned = "c_" + cleaned
    return cleaned


def variable(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "_", name[:1].upper() + name[1:])


def rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _constant_sort(c: Constant) -> str:
    return "degree" if c.kind in ("theta", "delta", "degree") else "event" if c.kind == "event" else "entity"


class _Printer:
    def __init__(self) -> None:
        self.signature: dict[str, str] = {}

    def _declare(self, name: str, arg_sorts: list[str], result: str) -> None:
        result_type = "$o" if result == "bool" else SORT_TYPES[result]
        if not arg_sorts:
            decl = result_type
        elif len(arg_sorts) == 1:
            decl = f"{SORT_TYPES[arg_sorts[0]]} > {result_type}"
        else:
            decl = f"({' * '.join(SORT_TYPES[s] for s in arg_sorts)}) > {result_type}"
        self.signature.setdefault(symbol(name), decl)

    def term(self, t: Term, env: dict[str, str]) -> tuple[str, str]:
        """Printed term and its sort."""
        if isinstance(t, Variable):
            return variable(t.name), env.get(t.name, "entity")
        if isinstance(t, Constant):
            sort = _constant_sort(t)
            self._declare(t.name, [], sort)
            return symbol(t.name), sort
        if isinstance(t, DegreeExpr):
            return self._degree(t, env), "degree"
        head, args = spine(t)
        if not isinstance(head, Constant):
            raise UnsupportedAtom(f"cannot print {t} as a first-order term")
        printed = [self.term(a, env) for a in args]
        result = "entity" if head.kind == "function" else "event"
        self._declare(head.name, [s for _, s in printed], result)
        return f"{symbol(head.name)}({','.join(p for p, _ in printed)})", result

    def _degree(self, t: DegreeExpr, env: dict[str, str]) -> str:
        parts: list[str] = []
        if t.base is not None:
            base, _ = self.term(t.base, env)
            parts.append(f"$uminus({base})" if t.negated_scale else base)
        if t.offset or not parts:
            parts.append(rational(t.offset))
        for margin, coef in t.margins:
            printed, _ = self.term(margin, env)
            parts.append(printed if coef == 1 else f"$product({rational(coef)},{printed})")
        text = parts[0]
        for part in parts[1:]:
            text = f"$sum({text},{part})"
        return text

    def formula(self, f: Formula, env: dict[str, str]) -> str:
        if f == TRUE:
            return "$true"
        if isinstance(f, Connective):
            if f.op == "not":
                return f"~ {self.formula(f.args[0], env)}"
            joined = f" {BINARY[f.op]} ".join(self.formula(a, env) for a in f.args)
            return f"({joined})"
        if isinstance(f, Quantifier):
            mark = "!" if f.q == "forall" else "?"
            inner = {**env, f.var: f.sort}
            return f"({mark} [{variable(f.var)}: {SORT_TYPES[f.sort]}] : {self.formula(f.body, inner)})"
        if isinstance(f, ArithAtom):
            lhs, _ = self.term(f.lhs, env)
            rhs, _ = self.term(f.rhs, env)
            if f.op == "eq":
                return f"({lhs} = {rhs})"
            return f"{ARITH_PREDICATES[f.op]}({lhs},{rhs})"
        head, args = spine(f)
        if not isinstance(head, Constant):
            raise UnsupportedAtom(f"cannot print {f} as an atom")
        printed = [self.term(a, env) for a in args]
        if head.name == EQUALITY:
            return f"({printed[0][0]} = {printed[1][0]})"
        self._declare(head.name, [s for _, s in printed], "bool")
        if not printed:
            return symbol(head.name)
        return f"{symbol(head.name)}({','.join(p for p, _ in printed)})"


def to_tptp(name: str, role: str, formula: Formula) -> str:
    """One annotated TFF formula line."""
    return f"tff({symbol(name)}, {role}, {_Printer().formula(formula, {})})."


def tptp_problem(name: str, premises: Iterable[Formula], axioms: Iterable[Formula], goal: Formula) -> str:
    """A complete TFF problem: type declarations, axioms, premises, then the conjecture."""
    printer = _Printer()
    body: list[str] = []
    for i, axiom in enumerate(axioms, start=1):
        body.append(f"tff(axiom_{i}, axiom, {printer.formula(axiom, {})}).")
    for i, premise in enumerate(premises, start=1):
        body.append(f"tff(premise_{i}, axiom, {printer.formula(premise, {})}).")
    body.append(f"tff(goal, conjecture, {printer.formula(goal, {})}).")
    header = [f"% {name}", "tff(entity_type, type, entity: $tType).", "tff(event_type, type, event: $tType)."]
    header += [f"tff(decl_{sym}, type, {sym}: {decl})." for sym, decl in sorted(printer.signature.items())]
    logger.debug("Exported %s with %d formulas", name, len(body))
    return "\n".join(header + body) + "\n"
