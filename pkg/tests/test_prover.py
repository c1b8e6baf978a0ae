import shutil
import sys
from fractions import Fraction

import pytest

from src.axioms.schemata import Schema, instantiate_axioms
from src.logic.normalize import beta_normalize
from src.logic.syntax import parse_term
from src.logic.terms import conj, neg
from src.prover.arith import Offset
from src.prover.clauses import (
    Clause, FFun, FVar, Lit, PredAtom, SkolemNamer, canonical_variant, clausify, shift, unify,
)
from src.prover.external import ExternalProver, ExternalProverError
from src.prover.model_check import TooLarge, degree_grid, entity_constants, model_check, threshold_constants
from src.prover.saturation import Budget, factors, replay_proof, resolvents, saturate, subsumes
from src.prover.tptp import rational, symbol, to_tptp, tptp_problem, variable

TAROS_LEAD = "(exists d:degree (and (heavy taro d) (not (heavy jiro d))))"
JIRO_OVER_70 = "(exists d:degree (and (heavy jiro d) (gt d 70)))"
TARO_OVER_70 = "(exists d:degree (and (heavy taro d) (gt d 70)))"

posix_only = pytest.mark.skipif(sys.platform.startswith("win") or shutil.which("sh") is None, reason="needs a POSIX shell")


def formula(text):
    return beta_normalize(parse_term(text))


def lit(positive, pred, *args):
    return Lit(positive, PredAtom(pred, tuple(FFun(a) if a.islower() else FVar(a) for a in args)))


def refute(premises, goal, axioms=(), budget=None):
    namer = SkolemNamer()
    clauses, support = [], []
    for f in premises:
        new = clausify(f, namer)
        clauses += new
        support += [True] * len(new)
    for f in axioms:
        new = clausify(f, namer)
        clauses += new
        support += [False] * len(new)
    new = clausify(neg(goal), namer)
    return saturate(clauses + new, budget or Budget(time_limit=30.0), support + [True] * len(new))


def cp_axioms(registry):
    return [a.formula for a in instantiate_axioms({"heavy"}, registry).axioms]


# Clauses

def test_unification_works_modulo_offsets():
    subst = unify(shift(FVar("X"), Offset.of(2)), shift(FFun("b"), Offset.of(5)), {})
    assert subst == {"X": shift(FFun("b"), Offset.of(3))}
    assert unify(shift(FFun("a"), Offset.of(1)), shift(FFun("a"), Offset.of(2)), {}) is None


def test_clausify_skolemizes_under_universals():
    clauses = clausify(formula("(forall x:entity (implies (student x) (exists d:degree (heavy x d))))"))
    assert len(clauses) == 1
    assert {str(l) for l in clauses[0].literals} == {"~student(X1)", "heavy(X1,sk_d1(X1))"}


def test_clausify_splits_conjunctions():
    clauses = clausify(formula("(and (heavy taro theta_heavy) (not (heavy jiro theta_heavy)))"))
    assert sorted(map(str, clauses)) == ["heavy(taro,theta_heavy)", "~heavy(jiro,theta_heavy)"]


def test_canonical_variant_renames_in_order():
    clause = canonical_variant([lit(True, "p", "Y"), lit(False, "q", "Z", "Y")])
    assert str(clause) == "p(V0) | ~q(V1,V0)"


def test_subsumption():
    general = Clause.of([lit(True, "p", "X")])
    specific = Clause.of([lit(True, "p", "a"), lit(True, "q", "b")])
    assert subsumes(general, specific)
    assert not subsumes(specific, general)


def test_resolution_and_factoring():
    left = Clause.of([lit(True, "p", "X"), lit(True, "q", "X")])
    right = Clause.of([lit(False, "p", "a")])
    assert [str(c) for c in resolvents(left, right)] == ["q(a)"]
    doubled = Clause.of([lit(True, "p", "X"), lit(True, "p", "a")])
    assert [str(c) for c in factors(doubled)] == ["p(a)"]


# Saturation

def test_tautology_is_proved_with_a_replayable_trace():
    result = refute([], formula("(forall x:entity (implies (student x) (student x)))"))
    assert result.proved
    assert replay_proof(result)
    assert result.trace().splitlines()[-1].split(": ")[1].startswith("[]")


def test_comparative_chain_needs_the_consistency_postulate(registry):
    premises = [formula(TAROS_LEAD), formula(JIRO_OVER_70)]
    assert not refute(premises, formula(TARO_OVER_70)).proved
    result = refute(premises, formula(TARO_OVER_70), cp_axioms(registry))
    assert result.proved
    assert replay_proof(result)


def test_measure_arithmetic_closes_proofs():
    result = refute([formula("(heavy taro 75)")], formula(TARO_OVER_70))
    assert result.proved


def test_non_theorem_saturates():
    result = refute([formula("(student taro)")], formula("(student jiro)"))
    assert result.status == "saturated"
    assert not replay_proof(result)


def test_clause_budget_stops_the_search():
    result = refute([formula("(student taro)")], formula("(student jiro)"), budget=Budget(max_clauses=0))
    assert result.status == "resource_out"


def test_event_equalities_use_congruence():
    premise = formula(
        "(exists e:event (and (buy e) (= (Nom e) taro) (= (Acc e) hon1)))"
    )
    goal = formula("(exists e:event (and (buy e) (= (Nom e) taro)))")
    assert refute([premise], goal).proved


# Finite-model oracle

def test_degree_grid_pads_around_numerals():
    assert degree_grid(formula(TARO_OVER_70), 4) == [Fraction(68), Fraction(69), Fraction(70), Fraction(71)]
    with pytest.raises(TooLarge):
        degree_grid(formula("(and (gt 1 2) (gt 3 4))"), 3)


def test_constant_collection():
    f = formula("(and (heavy taro theta_heavy) (fast itel theta_fast))")
    assert entity_constants(f) == ["itel", "taro"]
    assert threshold_constants(f) == ["theta_fast", "theta_heavy"]


def test_model_check_finds_and_refutes_models(registry):
    assert model_check(formula(TAROS_LEAD))
    assert not model_check(formula("(and (heavy taro theta_heavy) (not (heavy taro theta_heavy)))"))
    assert not model_check(formula("(gt 70 75)"))
    countermodel = conj(formula(TAROS_LEAD), formula(JIRO_OVER_70), neg(formula(TARO_OVER_70)))
    assert model_check(countermodel)
    assert not model_check(conj(countermodel, *[a.formula for a in instantiate_axioms({"heavy"}, registry).by_schema(Schema.CP)]))


def test_model_check_bounds():
    with pytest.raises(TooLarge):
        model_check(formula("(exists e:event (buy e))"))
    with pytest.raises(TooLarge):
        model_check(formula("(and (student taro) (student jiro))"), entities=1)
    with pytest.raises(TooLarge):
        model_check(formula("(student taro)"), entities=99)
    with pytest.raises(TooLarge):
        model_check(formula("(forall x:entity (and (student x) (not (student x))))"), entities=0)
    with pytest.raises(TooLarge):
        model_check(formula("(gt 75 70)"), degree_points=0)


# TPTP

def test_tptp_names():
    assert symbol("PC-6082") == "pc_6082"
    assert symbol("6082") == "c_6082"
    assert variable("d1") == "D1"
    assert rational(Fraction(-1, 2)) == "-1/2"


def test_to_tptp_prints_typed_quantifiers():
    line = to_tptp("g", "conjecture", parse_term(TARO_OVER_70))
    assert line == "tff(g, conjecture, (? [D: $rat] : (heavy(taro,D) & $greater(D,70/1))))."


def test_tptp_problem_layout(registry):
    text = tptp_problem("chain", [formula(TAROS_LEAD)], cp_axioms(registry)[:1], formula(TARO_OVER_70))
    lines = text.splitlines()
    assert lines[0] == "% chain"
    assert "tff(entity_type, type, entity: $tType)." in lines
    assert "tff(decl_heavy, type, heavy: (entity * $rat) > $o)." in lines
    assert "tff(decl_taro, type, taro: entity)." in lines
    assert lines[-3].startswith("tff(axiom_1, axiom,")
    assert lines[-2].startswith("tff(premise_1, axiom,")
    assert lines[-1].startswith("tff(goal, conjecture,")


# External prover

@posix_only
def test_external_prover_reads_the_success_marker(tmp_path):
    problem = tmp_path / "p.p"
    verdict = ExternalProver("echo SZS status Theorem for").prove_text("tff(goal, conjecture, $true).\n", problem)
    assert verdict.proved and not verdict.timed_out
    assert str(problem) in verdict.output
    assert not ExternalProver("echo CounterSatisfiable").run_file(problem).proved


@posix_only
def test_external_prover_substitutes_the_path(tmp_path):
    problem = tmp_path / "p.p"
    verdict = ExternalProver("cat {path}", success_marker="conjecture").prove_text("tff(goal, conjecture, $true).\n", problem)
    assert verdict.proved


@posix_only
def test_external_prover_timeout(tmp_path):
    verdict = ExternalProver("sh -c 'sleep 5' {path}", timeout=0.2).run_file(tmp_path / "p.p")
    assert verdict.timed_out and not verdict.proved


def test_external_prover_errors(tmp_path):
    with pytest.raises(ExternalProverError):
        ExternalProver("   ")
    with pytest.raises(ExternalProverError):
        ExternalProver("no-such-prover-binary-xyz").run_file(tmp_path / "p.p")
