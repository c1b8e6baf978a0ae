import pytest

from src.axioms.registry import AdjectiveRegistry, RegistryError, UnregisteredAdjective
from src.axioms.schemata import Schema, instantiate_axioms
from src.logic.syntax import parse_term
from src.logic.terms import conj, extract_formula
from src.prover.model_check import model_check


def test_antonyms_share_the_positive_scale(registry):
    assert registry.get("light").scale_id == "heavy"
    assert registry.get("light").theta == "theta_heavy"
    assert registry.get("heavy").unit == "kg"
    assert registry.get("fast").unit is None
    assert registry.get("early_riser").antonym is None


def test_unregistered_adjective(registry):
    with pytest.raises(UnregisteredAdjective):
        registry.get("big")


@pytest.mark.parametrize("rows", [
    [("heavy", "+", "light", "kg")],
    [("heavy", "+", "light", None), ("light", "+", "heavy", None)],
    [("heavy", "+", "light", None), ("light", "-", "fast", None), ("fast", "+", None, None)],
    [("heavy", "?", None, None)],
])
def test_inconsistent_registries_are_rejected(rows):
    with pytest.raises(RegistryError):
        AdjectiveRegistry.from_rows(rows)


def test_registry_rejects_short_rows(tmp_path):
    path = tmp_path / "adjectives.tsv"
    path.write_text("heavy\t+\tlight\n", encoding="utf-8")
    with pytest.raises(RegistryError):
        AdjectiveRegistry.load(path)


def test_collect_adjectives_closes_under_antonymy(registry):
    formulas = [parse_term("(exists d:degree (and (fast itel d) (not (fast apcom d))))")]
    assert registry.collect_adjectives(formulas) == {"fast", "slow"}
    assert registry.collect_adjectives([parse_term("(student taro)")]) == set()


def test_height_has_its_own_antonym(registry):
    formulas = [parse_term("(exists d:degree (tall taro d))")]
    assert registry.collect_adjectives(formulas) == {"tall", "short_stature"}
    assert registry.get("short_stature").theta == "theta_tall"
    assert registry.get("short_stature").unit == "cm"
    assert registry.get("short").antonym == "long"
    axioms = instantiate_axioms({"tall", "short_stature"}, registry)
    assert [a.lemmas for a in axioms.by_schema(Schema.DOWN)] == [("short_stature",)]


def test_rescale_renames_antonym_constants(registry):
    term = registry.rescale(parse_term("(light taro theta_light)"))
    assert term == parse_term("(light taro theta_heavy)")
    untouched = parse_term("(heavy taro theta_heavy)")
    assert registry.rescale(untouched) == untouched


def test_axioms_for_an_antonym_pair(registry):
    axioms = instantiate_axioms({"fast", "slow"}, registry)
    assert len(axioms) == 8
    assert len(axioms.by_schema(Schema.CP)) == 2
    assert len(axioms.by_schema(Schema.ANT)) == 1
    assert [a.lemmas for a in axioms.by_schema(Schema.UP)] == [("fast",)]
    assert [a.lemmas for a in axioms.by_schema(Schema.DOWN)] == [("slow",)]
    assert len(axioms.by_schema(Schema.DELTA)) == 3


def test_axioms_are_closed_formulas(registry):
    for axiom in instantiate_axioms(registry.lemmas, registry).axioms:
        assert extract_formula(axiom.formula) is axiom.formula


def test_axiom_order_is_deterministic(registry):
    first = [str(a) for a in instantiate_axioms(["slow", "fast"], registry).axioms]
    second = [str(a) for a in instantiate_axioms(["fast", "slow", "fast"], registry).axioms]
    assert first == second


def test_unknown_lemma_in_axioms(registry):
    with pytest.raises(UnregisteredAdjective):
        instantiate_axioms({"big"}, registry)


def test_delta_uses_the_scale_constants(registry):
    (delta,) = [a for a in instantiate_axioms({"light"}, registry).by_schema(Schema.DELTA) if a.lemmas == ("light",)]
    assert "theta_heavy" in str(delta.formula) and "delta_heavy" in str(delta.formula)


def test_axioms_admit_a_single_atomic_fact(registry):
    for lemma in registry.lemmas:
        fact = extract_formula(parse_term(f"({lemma} taro {registry.get(lemma).theta})"))
        axioms = instantiate_axioms(registry.collect_adjectives([fact]), registry)
        assert model_check(conj(fact, *axioms.formulas())), lemma
