import logging
from fractions import Fraction

from src.core.config import DEFAULT_STEP_BUDGET
from src.core.system import EngineError
from src.grammar.category import Rule
from src.grammar.parser import Derivation, Leaf, leaves
from src.logic.normalize import LEFTMOST_OUTERMOST, beta_normalize
from src.logic.terms import Abstraction, Application, LambdaTerm, Variable
from src.semantics.multisem import MultiSem
from src.semantics.templates import differential_modifier, get_template, instantiate

logger = logging.getLogger(__name__)

EQUATIVE_TEMPLATES = frozenset({"equative", "equative_presup"})
CLAUSAL_TEMPLATES = frozenset({"yori_clausal", "yori_clausal_no", "yori_phrasal_clausal"})

_COMPOSITION_VAR = "c"


class UnitMismatch(EngineError):
    def __init__(self, unit: str, adjective: str, expected: str):
        super().__init__(f"unit {unit!r} cannot measure {adjective!r} (expects {expected!r})")
        self.unit = unit
        self.adjective = adjective


class CompositionError(EngineError):
    pass


def compose(derivation: Derivation, budget: int = DEFAULT_STEP_BUDGET, strategy: str = LEFTMOST_OUTERMOST) -> LambdaTerm:
    """Folds rule semantics over a derivation, normalizing at every node."""
    if isinstance(derivation, Leaf):
        get_template(derivation.entry.template_id)
        return instantiate(derivation.entry.template_id, derivation.entry.lemma)
    modifier = _differential_phrase(derivation)
    if modifier is not None:
        return modifier
    left = compose(derivation.left, budget, strategy)
    right = compose(derivation.right, budget, strategy)
    rule = derivation.rule
    if rule is Rule.FA:
        term = Application(left, right)
    elif rule is Rule.BA:
        term = Application(right, left)
    elif rule in (Rule.FC, Rule.FCX):
        term = Abstraction(_COMPOSITION_VAR, Application(left, Application(right, Variable(_COMPOSITION_VAR))))
    else:
        term = Abstraction(_COMPOSITION_VAR, Application(right, Application(left, Variable(_COMPOSITION_VAR))))
    return beta_normalize(term, budget, strategy)


def _differential_phrase(node) -> LambdaTerm | None:
    left, right = node.left, node.right
    if (
        node.rule is Rule.BA
        and isinstance(left, Leaf) and left.entry.template_id == "numeral"
        and isinstance(right, Leaf) and right.entry.template_id == "differential_unit"
    ):
        return differential_modifier(Fraction(left.entry.lemma))
    return None


def check_units(derivation: Derivation, registry) -> None:
    """Raises UnitMismatch when a unit word and an adjective both declare different units."""
    if registry is None:
        return
    all_leaves = list(leaves(derivation))
    units = [leaf for leaf in all_leaves if leaf.entry.has("unit")]
    adjectives = [leaf for leaf in all_leaves if leaf.entry.has("adj") and leaf.entry.lemma in registry]
    for unit in units:
        for adjective in adjectives:
            expected = registry.get(adjective.entry.lemma).unit
            if expected and unit.entry.lemma != expected:
                raise UnitMismatch(unit.entry.lemma, adjective.entry.lemma, expected)


def compose_measure(derivation: Derivation, registry=None, budget: int = DEFAULT_STEP_BUDGET) -> LambdaTerm:
    """Measure-phrase comparative: `<n> <unit> yori ADJ`."""
    check_units(derivation, registry)
    return compose(derivation, budget)


def compose_differential(derivation: Derivation, registry=None, budget: int = DEFAULT_STEP_BUDGET) -> LambdaTerm:
    """Differential comparative: `NP yori <n> <unit> ADJ`."""
    check_units(derivation, registry)
    return compose(derivation, budget)


def compose_equative(derivation: Derivation, budget: int = DEFAULT_STEP_BUDGET) -> MultiSem:
    return MultiSem.from_term(compose(derivation, budget))


def compose_clausal(derivation: Derivation, budget: int = DEFAULT_STEP_BUDGET) -> LambdaTerm:
    """Clausal and phrasal-clausal comparatives; the clause must be gapped in object position."""
    if not any(leaf.entry.template_id in CLAUSAL_TEMPLATES for leaf in leaves(derivation)):
        raise CompositionError("derivation contains no clausal comparative marker")
    return compose(derivation, budget)


def compose_sentence(derivation: Derivation, registry=None, budget: int = DEFAULT_STEP_BUDGET) -> MultiSem:
    """Chooses the composition operation by the constructions present in the derivation."""
    templates = {leaf.entry.template_id for leaf in leaves(derivation)}
    if templates & EQUATIVE_TEMPLATES:
        return compose_equative(derivation, budget)
    if templates & CLAUSAL_TEMPLATES:
        return MultiSem.from_term(compose_clausal(derivation, budget))
    if "yori_measure" in templates:
        return MultiSem.from_term(compose_measure(derivation, registry, budget))
    if "differential_unit" in templates:
        return MultiSem.from_term(compose_differential(derivation, registry, budget))
    return MultiSem.from_term(compose(derivation, budget))
