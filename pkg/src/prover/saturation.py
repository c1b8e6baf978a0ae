import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Iterator, Literal

from src.core.config import DEFAULT_PROVER_MAX_CLAUSES, DEFAULT_PROVER_MAX_LITERALS, DEFAULT_PROVER_TIME_LIMIT_S
from src.prover.arith import UnsupportedAtom
from src.prover.clauses import (
    ArithAtomF, Clause, FFun, FShift, FTerm, Lit, PredAtom, apply_clause, atom_vars,
    canonical_variant, clause_vars, rename_clause, split_shift, unify_atoms,
)
from src.prover.theory import decide_arith

logger = logging.getLogger(__name__)

ProofStatus = Literal["proved", "saturated", "timeout", "resource_out"]

EQUALITY = "="
AGE_PICK_EVERY = 5


@dataclass(frozen=True)
class Budget:
    time_limit: float = DEFAULT_PROVER_TIME_LIMIT_S
    max_clauses: int = DEFAULT_PROVER_MAX_CLAUSES
    max_literals: int = DEFAULT_PROVER_MAX_LITERALS


@dataclass(frozen=True)
class ProofStep:
    clause_id: int
    clause: Clause
    rule: str
    parents: tuple[int, ...] = ()

    def __str__(self) -> str:
        origin = f"{self.rule}({', '.join(map(str, self.parents))})" if self.parents else self.rule
        return f"{self.clause_id}: {self.clause}    [{origin}]"


@dataclass
class ProofResult:
    status: ProofStatus
    steps: list[ProofStep] = field(default_factory=list)
    generated: int = 0
    kept: int = 0
    seconds: float = 0.0

    @property
    def proved(self) -> bool:
        return self.status == "proved"

    def trace(self) -> str:
        return "\n".join(str(step) for step in self.steps)


def _is_ground(lit: Lit) -> bool:
    return not atom_vars(lit.atom)


def _same_base(atom: ArithAtomF) -> bool:
    return split_shift(atom.lhs)[0] == split_shift(atom.rhs)[0]


def _weight(clause: Clause) -> int:
    return sum(len(str(lit)) for lit in clause.literals)


class _Congruence:
    """Union-find over ground terms, closed under congruence of function symbols."""

    def __init__(self) -> None:
        self._parent: dict[FTerm, FTerm] = {}
        self._apps: set[FFun] = set()

    def _register(self, term: FTerm) -> None:
        if term in self._parent:
            return
        self._parent[term] = term
        if isinstance(term, FFun) and term.args:
            self._apps.add(term)
            for arg in term.args:
                self._register(arg)
        elif isinstance(term, FShift):
            self._register(term.base)

    def find(self, term: FTerm) -> FTerm:
        self._register(term)
        while self._parent[term] != term:
            self._parent[term] = self._parent[self._parent[term]]
            term = self._parent[term]
        return term

    def union(self, left: FTerm, right: FTerm) -> None:
        self._register(left)
        self._register(right)
        a, b = self.find(left), self.find(right)
        if a != b:
            self._parent[max(a, b, key=str)] = min(a, b, key=str)
            self._close()

    def _close(self) -> None:
        changed = True
        while changed:
            changed = False
            apps = sorted(self._apps, key=str)
            for f, g in itertools.combinations(apps, 2):
                if f.name != g.name or len(f.args) != len(g.args) or self.find(f) == self.find(g):
                    continue
                if all(self.find(a) == self.find(b) for a, b in zip(f.args, g.args)):
                    self._parent[self.find(f)] = self.find(g)
                    changed = True

    def equal(self, left: FTerm, right: FTerm) -> bool:
        return self.find(left) == self.find(right)


def resolvents(left: Clause, right: Clause) -> Iterator[Clause]:
    """Binary resolvents of two clauses, renamed apart and in canonical variable form."""
    a = rename_clause(left, "a")
    b = rename_clause(right, "b")
    for i, lit in enumerate(a):
        for j, other in enumerate(b):
            if lit.positive == other.positive:
                continue
            subst = unify_atoms(lit.atom, other.atom)
            if subst is None:
                continue
            rest = apply_clause(a[:i] + a[i + 1:] + b[:j] + b[j + 1:], subst)
            yield canonical_variant(rest)


def factors(clause: Clause) -> Iterator[Clause]:
    lits = list(clause.literals)
    for i, j in itertools.combinations(range(len(lits)), 2):
        if lits[i].positive != lits[j].positive:
            continue
        subst = unify_atoms(lits[i].atom, lits[j].atom)
        if subst is None or not subst:
            continue
        yield canonical_variant(apply_clause(lits[:j] + lits[j + 1:], subst))


def subsumes(general: Clause, specific: Clause) -> bool:
    if len(general) > len(specific):
        return False
    frozen = {name: FFun(f"${name}") for name in clause_vars(specific)}
    targets = apply_clause(specific.literals, frozen)

    def search(index: int, subst) -> bool:
        if index == len(general.literals):
            return True
        lit = general.literals[index]
        for target in targets:
            if target.positive != lit.positive:
                continue
            extended = unify_atoms(lit.atom, target.atom, subst)
            if extended is not None and search(index + 1, extended):
                return True
        return False

    return search(0, {})


class Saturator:
    """Given-clause saturation with binary resolution, factoring and arithmetic closure.

    Clauses outside the set of support (the axioms) are never resolved
    against each other.
    """

    def __init__(self, budget: Budget | None = None):
        self.budget = budget or Budget()

    def saturate(self, clauses: list[Clause], support: list[bool] | None = None) -> ProofResult:
        run = _Run(self.budget)
        return run.execute(clauses, support or [True] * len(clauses))


def saturate(clauses: list[Clause], budget: Budget | None = None, support: list[bool] | None = None) -> ProofResult:
    return Saturator(budget).saturate(clauses, support)


class _Found(Exception):
    def __init__(self, clause_id: int):
        self.clause_id = clause_id


class _Run:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.records: dict[int, ProofStep] = {}
        self.support: dict[int, bool] = {}
        self.ids = itertools.count(1)
        self.arith_units: list[tuple[int, Lit]] = []
        self.eq_units: list[int] = []
        self.congruence = _Congruence()
        self.passive: dict[int, Clause] = {}
        self.by_weight: list[tuple[int, int]] = []
        self.by_age: list[int] = []
        self.active: list[int] = []
        self.seen: set[Clause] = set()
        self.generated = 0
        self.started = time.monotonic()

    def _record(self, clause: Clause, rule: str, parents: tuple[int, ...], support: bool) -> int:
        clause_id = next(self.ids)
        self.records[clause_id] = ProofStep(clause_id, clause, rule, parents)
        self.support[clause_id] = support
        return clause_id

    def execute(self, clauses: list[Clause], support: list[bool]) -> ProofResult:
        try:
            if self.budget.max_clauses <= 0:
                return self._result("resource_out")
            for clause, supported in zip(clauses, support):
                clause_id = self._record(clause, "input", (), supported)
                self._keep(clause_id, enforce_cap=False)
            picks = 0
            while self.passive:
                if time.monotonic() - self.started > self.budget.time_limit:
                    return self._result("timeout")
                if self.generated > self.budget.max_clauses:
                    return self._result("resource_out")
                picks += 1
                given_id = self._pop(by_age=picks % AGE_PICK_EVERY == 0)
                given_id = self._simplify(given_id)
                if given_id is None:
                    continue
                given = self.records[given_id].clause
                if any(subsumes(self.records[a].clause, given) for a in self.active):
                    continue
                self.active.append(given_id)
                self._infer(given_id)
            return self._result("saturated")
        except _Found as found:
            return self._result("proved", found.clause_id)

    def _pop(self, by_age: bool) -> int:
        heap = self.by_age if by_age else self.by_weight
        while heap:
            item = heapq.heappop(heap)
            clause_id = item if by_age else item[1]
            if clause_id in self.passive:
                del self.passive[clause_id]
                return clause_id
        return self._pop(not by_age)

    def _infer(self, given_id: int) -> None:
        given = self.records[given_id].clause
        for factor in factors(given):
            self._derive(factor, "factor", (given_id,), self.support[given_id])
        for other_id in list(self.active):
            if not (self.support[given_id] or self.support[other_id]):
                continue
            other = self.records[other_id].clause
            for resolvent in resolvents(given, other):
                self._derive(resolvent, "resolve", (given_id, other_id), True)

    def _derive(self, clause: Clause, rule: str, parents: tuple[int, ...], support: bool) -> None:
        self.generated += 1
        if clause in self.seen:
            return
        clause_id = self._record(clause, rule, parents, support)
        self._keep(clause_id, enforce_cap=True)

    def _keep(self, clause_id: int, enforce_cap: bool) -> None:
        simplified = self._simplify(clause_id)
        if simplified is None:
            return
        clause = self.records[simplified].clause
        if clause.is_empty:
            raise _Found(simplified)
        if enforce_cap and len(clause) > self.budget.max_literals:
            return
        if clause in self.seen:
            return
        if any(subsumes(self.records[a].clause, clause) for a in self.active):
            return
        self.seen.add(clause)
        self.passive[simplified] = clause
        heapq.heappush(self.by_weight, (_weight(clause), simplified))
        heapq.heappush(self.by_age, simplified)
        if len(clause) == 1:
            self._learn_unit(simplified, clause.literals[0])

    def _learn_unit(self, clause_id: int, lit: Lit) -> None:
        if not _is_ground(lit):
            return
        if lit.is_arith:
            self.arith_units.append((clause_id, lit))
        elif lit.positive and isinstance(lit.atom, PredAtom) and lit.atom.pred == EQUALITY:
            self.eq_units.append(clause_id)
            self.congruence.union(*lit.atom.args)

    def _simplify(self, clause_id: int) -> int | None:
        """Returns the id of the simplified clause, or None when it is a tautology."""
        clause = self.records[clause_id].clause
        lits = list(clause.literals)
        texts = {str(l) for l in lits}
        if any(str(l.negate()) in texts for l in lits):
            return None
        kept: list[Lit] = []
        used: set[int] = set()
        for lit in lits:
            verdict, parents = self._evaluate(lit, clause_id)
            if verdict is True:
                return None
            if verdict is False:
                used |= parents
                continue
            kept.append(lit)
        if len(kept) == len(lits):
            return clause_id
        new_clause = Clause.of(kept)
        parents = (clause_id,) + tuple(sorted(used))
        return self._record(new_clause, "simplify", parents, self.support[clause_id])

    def _evaluate(self, lit: Lit, own_id: int) -> tuple[bool | None, set[int]]:
        atom = lit.atom
        if isinstance(atom, PredAtom) and atom.pred == EQUALITY and len(atom.args) == 2:
            left, right = atom.args
            if left == right:
                return lit.positive, set()
            if _is_ground(lit) and self.eq_units and own_id not in self.eq_units:
                if self.congruence.equal(left, right):
                    return lit.positive, set(self.eq_units)
            return None, set()
        if not isinstance(atom, ArithAtomF):
            return None, set()
        if not (_is_ground(lit) or _same_base(atom)):
            return None, set()
        units = [(i, u) for i, u in self.arith_units if i != own_id] if _is_ground(lit) else []
        context = [u for _, u in units]
        try:
            if decide_arith(context + [lit]) == "unsat":
                return False, {i for i, _ in units}
            if decide_arith(context + [lit.negate()]) == "unsat":
                return True, {i for i, _ in units}
        except UnsupportedAtom:
            logger.debug("Leaving %s to resolution", lit)
        return None, set()

    def _result(self, status: ProofStatus, empty_id: int | None = None) -> ProofResult:
        steps: list[ProofStep] = []
        if empty_id is not None:
            needed: set[int] = set()
            stack = [empty_id]
            while stack:
                current = stack.pop()
                if current in needed:
                    continue
                needed.add(current)
                stack.extend(self.records[current].parents)
            steps = [self.records[i] for i in sorted(needed)]
        elapsed = time.monotonic() - self.started
        logger.debug("Saturation ended with %s after %d generated clauses (%.2fs)", status, self.generated, elapsed)
        return ProofResult(status, steps, self.generated, len(self.seen), elapsed)


def replay_proof(result: ProofResult) -> bool:
    """Re-checks every recorded inference of a proof."""
    if not result.proved:
        return False
    by_id = {step.clause_id: step for step in result.steps}
    for step in result.steps:
        parents = [by_id[p].clause for p in step.parents if p in by_id]
        if len(parents) != len(step.parents):
            return False
        if step.rule == "input":
            continue
        if step.rule == "resolve":
            if step.clause not in set(resolvents(parents[0], parents[1])):
                return False
        elif step.rule == "factor":
            if step.clause not in set(factors(parents[0])):
                return False
        elif step.rule == "simplify":
            if not _replay_simplify(step.clause, parents[0], parents[1:]):
                return False
        else:
            return False
    return result.steps[-1].clause.is_empty


def _replay_simplify(result: Clause, original: Clause, units: list[Clause]) -> bool:
    if not set(result.literals) <= set(original.literals):
        return False
    arith = [u.literals[0] for u in units if len(u) == 1 and u.literals[0].is_arith]
    congruence = _Congruence()
    for unit in units:
        lit = unit.literals[0] if len(unit) == 1 else None
        if lit is not None and isinstance(lit.atom, PredAtom) and lit.atom.pred == EQUALITY and lit.positive:
            congruence.union(*lit.atom.args)
    for lit in set(original.literals) - set(result.literals):
        atom = lit.atom
        if isinstance(atom, PredAtom) and atom.pred == EQUALITY:
            if not lit.positive and (atom.args[0] == atom.args[1] or congruence.equal(*atom.args)):
                continue
            return False
        if isinstance(atom, ArithAtomF) and decide_arith(arith + [lit]) == "unsat":
            continue
        return False
    return True
