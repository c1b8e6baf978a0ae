import logging
from dataclasses import dataclass

from src.logic.terms import TRUE, Formula, Pair, Term, conj, extract_formula, neg

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MultiSem:
    """At-issue content plus presupposition (TRUE when there is none)."""

    at_issue: Term
    presupposition: Term = TRUE

    @classmethod
    def from_term(cls, term: Term) -> "MultiSem":
        if isinstance(term, Pair):
            return cls(term.at_issue, term.presupposition)
        return cls(term)

    @property
    def presupposes(self) -> bool:
        return self.presupposition != TRUE

    def negate_at_issue(self) -> "MultiSem":
        return MultiSem(neg(self.at_issue), self.presupposition)

    def formulas(self) -> tuple[Formula, Formula]:
        return extract_formula(self.at_issue), extract_formula(self.presupposition)

    def __str__(self) -> str:
        if not self.presupposes:
            return str(self.at_issue)
        return f"<{self.at_issue} | presupposes {self.presupposition}>"


def flatten(sem: MultiSem) -> Formula:
    """Conjoins the at-issue and presupposed content; TRUE conjuncts are dropped."""
    at_issue, presupposition = sem.formulas()
    return conj(at_issue, presupposition)
