import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from src.axioms.registry import POSITIVE, AdjectiveRegistry
from src.logic.normalize import beta_normalize
from src.logic.syntax import parse_term
from src.logic.terms import Formula

logger = logging.getLogger(__name__)


class Schema(Enum):
    CP = "CP"
    ANT = "ANT"
    UP = "UP"
    DOWN = "DOWN"
    DELTA = "DELTA"


# Consistency postulate: if x exceeds y at some degree, x reaches every degree y reaches.
_CP = (
    "(forall x:entity (forall y:entity (implies (exists d:degree (and ({a} x d) (not ({a} y d))))"
    " (forall d2:degree (implies ({a} y d2) ({a} x d2))))))"
)
_ANT = "(forall x:entity (forall d:degree (iff ({p} x d) (not ({n} x d)))))"
_UP = (
    "(forall x:entity (forall d:degree (implies ({a} x d)"
    " (forall d2:degree (implies (le d2 d) ({a} x d2))))))"
)
_DOWN = (
    "(forall x:entity (forall d:degree (implies ({a} x d)"
    " (forall d2:degree (implies (ge d2 d) ({a} x d2))))))"
)
_DELTA = "(forall x:entity (iff ({a} x (- {theta} {delta})) ({a} x (+ {theta} {delta}))))"
_DELTA_POSITIVE = "(gt {delta} 0)"


@dataclass(frozen=True)
class Axiom:
    schema: Schema
    lemmas: tuple[str, ...]
    formula: Formula = field(compare=False)

    def __str__(self) -> str:
        return f"{self.schema.value}({', '.join(self.lemmas)}): {self.formula}"


@dataclass
class AxiomSet:
    axioms: list[Axiom] = field(default_factory=list)

    def formulas(self) -> list[Formula]:
        return [axiom.formula for axiom in self.axioms]

    def by_schema(self, schema: Schema) -> list[Axiom]:
        return [axiom for axiom in self.axioms if axiom.schema is schema]

    def __len__(self) -> int:
        return len(self.axioms)


def _formula(text: str) -> Formula:
    return beta_normalize(parse_term(text))


def instantiate_axioms(lemmas: Iterable[str], registry: AdjectiveRegistry) -> AxiomSet:
    """Instantiates every schema for the given adjectives, in a deterministic order.

    Raises UnregisteredAdjective for a lemma the registry does not know.
    """
    infos = [registry.get(lemma) for lemma in sorted(set(lemmas))]
    result = AxiomSet()
    scales_done: set[str] = set()
    for info in infos:
        a = info.lemma
        result.axioms.append(Axiom(Schema.CP, (a,), _formula(_CP.format(a=a))))
        if info.antonym and info.polarity == POSITIVE:
            text = _ANT.format(p=a, n=info.antonym)
            result.axioms.append(Axiom(Schema.ANT, (a, info.antonym), _formula(text)))
        schema, text = (Schema.UP, _UP) if info.polarity == POSITIVE else (Schema.DOWN, _DOWN)
        result.axioms.append(Axiom(schema, (a,), _formula(text.format(a=a))))
        delta_text = _DELTA.format(a=a, theta=info.theta, delta=info.delta)
        result.axioms.append(Axiom(Schema.DELTA, (a,), _formula(delta_text)))
        if info.scale_id not in scales_done:
            scales_done.add(info.scale_id)
            positive = _formula(_DELTA_POSITIVE.format(delta=info.delta))
            result.axioms.append(Axiom(Schema.DELTA, (info.scale_id,), positive))
    logger.debug("Instantiated %d axioms for %s", len(result), ", ".join(i.lemma for i in infos))
    return result
