import random
from fractions import Fraction

import pytest

from src.core.data import GoldenFormulaManager
from src.logic.normalize import RIGHTMOST_INNERMOST, beta_normalize, rename_bound
from src.logic.syntax import TermSyntaxError, format_term, parse_term
from src.logic.terms import (
    TRUE, Abstraction, Application, ArithAtom, Constant, DegreeExpr, NonTerminating, OpenFormula,
    Pair, PairNotAllowed, ResidualLambda, Variable, alpha_eq, conj, extract_formula, free_vars, neg,
    numeral, substitute,
)

GOLDEN = GoldenFormulaManager()


def norm(text):
    return beta_normalize(parse_term(text))


def test_parse_reads_bound_names_as_variables():
    term = parse_term("(lambda x (heavy x theta_heavy))")
    assert isinstance(term, Abstraction)
    assert free_vars(term) == frozenset()
    assert parse_term("theta_heavy").kind == "theta"
    assert parse_term("?y") == Variable("y")


def test_parse_numbers_as_degree_constants():
    assert parse_term("70") == numeral(70)
    assert parse_term("-1/2") == DegreeExpr(None, Fraction(-1, 2))


@pytest.mark.parametrize("text", [
    "(forall d:degree (implies (heavy jiro d) (heavy taro (+ d 5))))",
    "(exists d:degree (and (heavy taro d) (not (gt d 70))))",
    "(pair (heavy taro theta_heavy) (heavy jiro theta_heavy))",
    "(lambda (x y) (buy x y))",
])
def test_format_reparses_to_the_same_term(text):
    term = parse_term(text)
    assert parse_term(format_term(term)) == term


@pytest.mark.parametrize("text", ["", "(heavy taro", "(not a b)", "(forall d:colour (p d))", "(f)", "a b"])
def test_malformed_terms_are_rejected(text):
    with pytest.raises(TermSyntaxError):
        parse_term(text)


def test_alpha_equivalence_ignores_binder_names():
    assert alpha_eq(parse_term("(lambda x (p x))"), parse_term("(lambda y (p y))"))
    assert not alpha_eq(parse_term("(lambda x (p x))"), parse_term("(lambda y (p ?x))"))
    assert not alpha_eq(
        parse_term("(forall d:degree (p d))"), parse_term("(exists d:degree (p d))")
    )


def test_substitution_avoids_capture():
    body = parse_term("(lambda y (r ?x y))").body
    result = substitute(Abstraction("y", body), "x", Variable("y"))
    assert isinstance(result, Abstraction)
    assert result.param != "y"
    assert free_vars(result) == frozenset({"y"})


def test_conj_flattens_and_drops_true():
    p, q = Constant("p"), Constant("q")
    assert conj() == TRUE
    assert conj(p, TRUE) == p
    assert conj(conj(p, q), p).args == (p, q, p)


def test_beta_reduces_to_normal_form():
    assert norm("((lambda (x y) (buy x y)) taro hon)") == parse_term("(buy taro hon)")


def test_both_strategies_agree():
    term = parse_term("((lambda F (F taro)) (lambda x ((lambda y (heavy y theta_heavy)) x)))")
    assert beta_normalize(term) == beta_normalize(term, strategy=RIGHTMOST_INNERMOST)


def test_theta_is_indexed_by_lemma():
    assert norm("(heavy taro (theta heavy))") == parse_term("(heavy taro theta_heavy)")


def test_less_than_is_oriented_to_greater_than():
    assert norm("(lt a b)") == ArithAtom("gt", Constant("b"), Constant("a"))
    assert norm("(le a b)") == ArithAtom("ge", Constant("b"), Constant("a"))


def test_one_point_rule_eliminates_equalities():
    assert norm("(exists x:entity (and (= x taro) (student x)))") == parse_term("(student taro)")


def test_degree_arithmetic_folds():
    assert norm("(heavy taro (+ (+ ?d 3) 2))") == parse_term("(heavy taro (+ ?d 5))")
    assert norm("(heavy taro (- (+ ?d 5) 5))") == parse_term("(heavy taro ?d)")
    assert norm("(heavy taro (neg (neg ?d)))") == parse_term("(heavy taro ?d)")


def test_margins_collect_by_name():
    term = norm("(gt (+ ?d delta_heavy delta_heavy) ?e)")
    assert term.lhs.margins == ((Constant("delta_heavy", "delta"), Fraction(2)),)


def test_pairs_are_lifted_through_connectives():
    term = norm("(not (pair (p taro) (q jiro)))")
    assert term == Pair(parse_term("(not (p taro))"), parse_term("(q jiro)"))


def test_nested_pairs_merge_presuppositions():
    term = norm("(pair (pair a b) c)")
    assert term == Pair(Constant("a"), conj(Constant("b"), Constant("c")))


def test_rename_bound_gives_distinct_binders():
    term = rename_bound(parse_term("(and (exists d:degree (p d)) (exists d:degree (q d)))"))
    assert format_term(term) == "(and (exists d1:degree (p d1)) (exists d2:degree (q d2)))"


def test_non_terminating_terms_hit_the_budget():
    omega = parse_term("(lambda x (x x))")
    with pytest.raises(NonTerminating):
        beta_normalize(Application(omega, omega), budget=50)


def test_extract_formula_checks_closedness():
    assert alpha_eq(extract_formula(norm("(forall x:entity (student x))")), parse_term("(forall x:entity (student x))"))
    with pytest.raises(OpenFormula):
        extract_formula(parse_term("(student ?x)"))
    with pytest.raises(ResidualLambda):
        extract_formula(parse_term("(lambda x (student x))"))
    with pytest.raises(ResidualLambda):
        extract_formula(parse_term("(forall x:entity ((lambda y (p y)) x))").body)
    with pytest.raises(PairNotAllowed):
        extract_formula(parse_term("(pair a b)"))


def test_neg_wraps_in_not():
    assert format_term(neg(Constant("p"))) == "(not p)"


@pytest.mark.parametrize("text", [
    "((lambda (x y) (buy x y)) taro hon)",
    "((lambda F (F taro)) (lambda x ((lambda y (heavy y theta_heavy)) x)))",
    "(not (pair (p taro) (q jiro)))",
    "(exists x:entity (and (= x taro) (student x)))",
    "(heavy taro (- (+ ?d 5) 5))",
    "(and (exists d:degree (p d)) (exists d:degree (q d)))",
])
def test_normalization_is_idempotent(text):
    once = norm(text)
    assert alpha_eq(beta_normalize(once), once)


@pytest.mark.parametrize("key", GOLDEN.ids())
def test_golden_formulas_are_normal_forms(key):
    once = beta_normalize(GOLDEN.term(key))
    assert alpha_eq(beta_normalize(once), once)


NAMES = ("x", "y", "z")


def random_term(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.7:
            return Variable(rng.choice(NAMES))
        return Constant(rng.choice(("p", "q")))
    if rng.random() < 0.5:
        return Abstraction(rng.choice(NAMES), random_term(rng, depth - 1))
    return Application(random_term(rng, depth - 1), random_term(rng, depth - 1))


def test_random_substitutions_never_capture():
    rng = random.Random(11)
    for _ in range(500):
        term, value = random_term(rng, 6), random_term(rng, 3)
        name = rng.choice(NAMES)
        expected = free_vars(term) - {name}
        if name in free_vars(term):
            expected |= free_vars(value)
        assert free_vars(substitute(term, name, value)) == expected, (term, name, value)
        assert alpha_eq(substitute(term, name, Variable(name)), term)
