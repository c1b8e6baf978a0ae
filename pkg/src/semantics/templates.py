"""Semantic templates keyed by template id.

Every template is a term `(lambda E ...)` abstracting over the lexical
constant. Adjective-like templates follow the five-argument protocol
`N(A, D, S, T, x)`: lemma, differential, scale, truth and subject.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from src.core.system import EngineError
from src.logic.normalize import beta_normalize
from src.logic.syntax import parse_term
from src.logic.terms import Abstraction, Application, Constant, LambdaTerm, Term, numeral

logger = logging.getLogger(__name__)

PLAIN = "plain"
PRESUPPOSING = "presupposing"


class UnknownTemplate(EngineError):
    def __init__(self, template_id: str):
        super().__init__(f"no semantic template named {template_id!r}")
        self.template_id = template_id


@dataclass(frozen=True)
class Template:
    template_id: str
    text: str
    dimension: str = PLAIN
    lemma_kind: str = "predicate"


# Scale-relative comparison against the standard N, with K_d = (lambda (A D S T z) (A z d)).
_KD = "(lambda (A2 D2 S2 T2 z) (A2 z d))"

_TEMPLATES: tuple[Template, ...] = (
    Template("proper_noun", "(lambda (E N F) (F E))", lemma_kind="entity"),
    Template("common_noun", "(lambda (E N F) (exists x:entity (and (N E x) (F x))))"),
    Template("noun_predicate", "(lambda (E Q) (Q (lambda I I) (lambda x (E x))))"),
    Template("determiner", "(lambda (E Q) Q)"),
    Template(
        "universal",
        "(lambda (E Q N F) (forall x:entity (implies (Q N (lambda y (= x y))) (F x))))",
    ),
    Template("particle", "(lambda (E Q) Q)"),
    Template("raise_subject", "(lambda (E Q V) (V Q))"),
    Template(
        "pronominal_no",
        "(lambda (E V N F) (exists y:entity (and (V (lambda (N2 G) (G y))) (F y))))",
    ),
    Template("identity_s", "(lambda (E S) S)"),
    Template("negation", "(lambda (E S) (not S))"),
    Template("identity_vp", "(lambda (E V) V)"),
    Template("cmp", "(lambda (E V) (V (lambda (A D S T x) (A x (theta A)))))"),
    Template(
        "pos_adj",
        "(lambda (E Q N) (Q (lambda I I) (lambda x (N E (lambda d d) (lambda d d) (lambda t t) x))))",
    ),
    Template(
        "neg_adj",
        "(lambda (E Q N) (Q (lambda I I)"
        " (lambda x (N E (lambda d d) (lambda d (neg d)) (lambda t (not t)) x))))",
    ),
    Template(
        "attr_pos_adj",
        "(lambda (E K P N F) (P (lambda (P2 y) (and (N P2 y)"
        " (K E (lambda d d) (lambda d d) (lambda t t) y))) F))",
    ),
    Template(
        "attr_neg_adj",
        "(lambda (E K P N F) (P (lambda (P2 y) (and (N P2 y)"
        " (K E (lambda d d) (lambda d (neg d)) (lambda t (not t)) y))) F))",
    ),
    Template(
        "yori_phrasal",
        "(lambda (E Q V) (V (lambda (A D S T x) (Q (lambda I I)"
        " (lambda y (exists d:degree (and (A x d) (not (A y d)))))))))",
    ),
    Template(
        "yori_measure",
        "(lambda (E Q V) (V (lambda (A D S T x) (Q (lambda I I)"
        " (lambda y (exists d:degree (and (A x d) (T (lt y d)))))))))",
    ),
    Template(
        "yori_differential",
        "(lambda (E Q V) (V (lambda (A D S T x) (Q (lambda I I)"
        " (lambda y (forall d:degree (implies (A y d) (A x (D d)))))))))",
    ),
    Template(
        "yori_clausal",
        "(lambda (E V M P N F) (V (lambda (N2 G) (exists d:degree"
        f" (and (M {_KD} P N F) (not (M {_KD} P N G)))))))",
    ),
    Template(
        "yori_clausal_no",
        "(lambda (E Q M P N F) (exists d:degree"
        f" (and (M {_KD} P N F) (not (M {_KD} P N (lambda x (Q (lambda I I) (lambda y (= x y)))))))))",
    ),
    Template(
        "yori_phrasal_clausal",
        "(lambda (E Q M P R x) (Q (lambda I I) (lambda s (exists d:degree"
        f" (and (M {_KD} P (lambda I I) (lambda y (R x y)))"
        f" (not (M {_KD} P (lambda I I) (lambda y (R s y)))))))))",
    ),
    Template(
        "izyoo_ni",
        "(lambda (E Q V) (V (lambda (A D S T x) (pair"
        " (Q (lambda I I) (lambda y (exists d:degree (and (A x d) (not (A y d))))))"
        " (Q (lambda I I) (lambda y (A y (theta A))))))))",
        dimension=PRESUPPOSING,
    ),
    Template(
        "hodo",
        "(lambda (E Q V) (V (lambda (A D S T x) (pair"
        " (Q (lambda I I) (lambda y (forall d:degree (implies (A y d) (A x d)))))"
        " (Q (lambda I I) (lambda y (A y (theta A))))))))",
        dimension=PRESUPPOSING,
    ),
    Template(
        "equative",
        "(lambda (E Q V) (V (lambda (A D S T x) (Q (lambda I I) (lambda y"
        " (forall d1:degree (forall d2:degree (implies"
        " (and (not (iff (A x d1) (A y d1))) (not (iff (A x d2) (A y d2))))"
        " (and (lt d1 (+ d2 (delta A))) (lt d2 (+ d1 (delta A))))))))))))",
    ),
    Template(
        "equative_presup",
        "(lambda (E Q V) (V (lambda (A D S T x) (pair (Q (lambda I I) (lambda y"
        " (forall d1:degree (forall d2:degree (implies"
        " (and (not (iff (A x d1) (A y d1))) (not (iff (A x d2) (A y d2))))"
        " (and (lt d1 (+ d2 (delta A))) (lt d2 (+ d1 (delta A)))))))))"
        " (Q (lambda I I) (lambda y (A y (theta A))))))))",
        dimension=PRESUPPOSING,
    ),
    Template(
        "trans_verb",
        "(lambda (E O Q) (Q (lambda I I) (lambda x (O (lambda I I) (lambda y"
        " (exists e:event (and (E e) (= (Nom e) x) (= (Acc e) y))))))))",
    ),
    Template(
        "trans_verb_pc",
        "(lambda (E O Q) (Q (lambda I I) (lambda x (O (lambda (z y)"
        " (exists e:event (and (E e) (= (Nom e) z) (= (Acc e) y)))) x))))",
    ),
    Template(
        "intrans_verb",
        "(lambda (E Q) (Q (lambda I I) (lambda x (exists e:event (and (E e) (= (Nom e) x))))))",
    ),
    Template("numeral", "(lambda (E) E)", lemma_kind="numeral"),
    Template("measure_unit", "(lambda (E n N F) (F n))"),
    # Placeholder body; the modifier is built by `differential_modifier` once the numeral is known.
    Template("differential_unit", "(lambda (E n) n)"),
)

TEMPLATES: dict[str, Template] = {t.template_id: t for t in _TEMPLATES}


def get_template(template_id: str) -> Template:
    try:
        return TEMPLATES[template_id]
    except KeyError:
        raise UnknownTemplate(template_id) from None


@lru_cache(maxsize=None)
def template_term(template_id: str) -> Term:
    template = get_template(template_id)
    term = parse_term(template.text)
    if not (isinstance(term, Abstraction) and term.param == "E"):
        raise UnknownTemplate(f"{template_id} (does not abstract over E)")
    return term


def instantiate(template_id: str, lemma: str) -> LambdaTerm:
    """Builds the lexical semantics of one entry from its template and lemma."""
    template = get_template(template_id)
    if template.lemma_kind == "numeral":
        return numeral(Fraction(lemma))
    constant = Constant(lemma, template.lemma_kind)
    return beta_normalize(Application(template_term(template_id), constant))


def differential_modifier(value: Fraction) -> LambdaTerm:
    """VP modifier for `<numeral> <unit>` in a differential comparative.

    Shifts the differential argument D by `value` along the adjective's
    scale, so a negative adjective subtracts it.
    """
    text = (
        "(lambda (V Q N) (V Q (lambda (A D S T x)"
        f" (N A (lambda d (S (+ (S d) {value}))) S T x))))"
    )
    return beta_normalize(parse_term(text))
