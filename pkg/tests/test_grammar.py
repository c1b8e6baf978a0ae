import random

import pytest
from nltk.tree import Tree

from src.core.data import GoldenFormulaManager
from src.grammar.category import Atomic, CategoryError, Functor, Rule, combine, parse_category
from src.grammar.lexicon import Lexicon, LexiconError, UnknownWord
from src.grammar.parser import ChartParser, NoParse, leaves, to_tree
from src.grammar.tokenizer import Tokenizer, UnknownToken
from src.grammar.transforms import MULTIWORD_TABLE, Token, assign_yori_features, insert_cmp, merge_multiword
from src.harness.dataset import load_dataset

C = parse_category
GOLDEN = GoldenFormulaManager()


@pytest.fixture(scope="module")
def tokenizer(lexicon):
    parts = {part for pattern in MULTIWORD_TABLE for part in pattern}
    return Tokenizer(lexicon.surfaces | parts)


def surfaces(tokens):
    return [t.surface for t in tokens]


# Categories

def test_parse_category_is_left_associative():
    category = C("(S\\NP)\\NP[case=acc]")
    assert category == Functor("\\", Functor("\\", Atomic("S"), Atomic("NP")), Atomic("NP", frozenset({("case", "acc")})))
    assert C("S\\NP\\NP[case=acc]") == category
    assert str(C("((S/S)\\NP)")) == "(S/S)\\NP"


@pytest.mark.parametrize("text", ["", "X", "S/", "(S/S", "NP[case]", "S)"])
def test_malformed_categories(text):
    with pytest.raises(CategoryError):
        C(text)


def test_application_rules():
    assert combine(Rule.FA, C("S/S"), C("S")) == C("S")
    assert combine(Rule.BA, C("NP"), C("S\\NP")) == C("S")
    assert combine(Rule.FA, C("S\\NP"), C("NP")) is None


def test_composition_rules():
    assert combine(Rule.FC, C("S/S"), C("S/NP")) == C("S/NP")
    assert combine(Rule.BC, C("S\\NP"), C("S\\S")) == C("S\\NP")
    assert combine(Rule.FCX, C("S/S"), C("S\\NP")) == C("S\\NP")
    assert combine(Rule.BCX, C("S/NP"), C("S\\S")) == C("S/NP")
    assert Rule.FCX.is_crossed and Rule.FC.is_composition and not Rule.BA.is_composition


def test_features_unify_when_absent_on_one_side():
    assert combine(Rule.BA, C("NP"), C("S\\NP[case=nom]")) == C("S")
    assert combine(Rule.BA, C("NP[case=acc]"), C("S\\NP[case=nom]")) is None
    assert combine(Rule.BA, C("NP[case=acc,pc=no]"), C("S\\NP[pc=no]")) == C("S")


# Lexicon

def test_lexicon_lookup_filters_by_yori_feature(lexicon):
    templates = {e.template_id for e in lexicon.lookup("yori", "measure")}
    assert templates == {"yori_measure"}
    clausal = {e.template_id for e in lexicon.lookup("yori", "clausal")}
    assert clausal == {"yori_clausal", "yori_clausal_no"}
    assert len(lexicon.lookup("yori")) == 6


def test_lexicon_numerals_share_one_entry(lexicon):
    (entry,) = lexicon.lookup("75")
    assert entry.category == C("NUM") and entry.lemma == "75"
    assert lexicon.has_flag("3.5", "num")


def test_lexicon_is_case_insensitive(lexicon):
    assert lexicon.lookup("taro")[0].lemma == "taro"
    assert "TARO" in lexicon
    assert lexicon.has_flag("kg", "unit") and not lexicon.has_flag("Taro", "unit")


def test_unknown_words(lexicon):
    with pytest.raises(UnknownWord):
        lexicon.lookup("ooku")
    with pytest.raises(UnknownWord):
        lexicon.lookup("yori", "comparative")


def test_lexicon_rejects_bad_rows(tmp_path):
    path = tmp_path / "lexicon.tsv"
    path.write_text("Taro\tNP\tproper_noun\ttaro\n", encoding="utf-8")
    with pytest.raises(LexiconError):
        Lexicon.load(path)
    path.write_text("Taro\tXP\tproper_noun\ttaro\t-\n", encoding="utf-8")
    with pytest.raises(LexiconError):
        Lexicon.load(path)


# Tokenizer and transforms

def test_tokenizer_splits_hyphens_and_final_period(tokenizer):
    assert tokenizer.tokenize("Taro-wa Jiro yori omoi.") == ["Taro", "wa", "Jiro", "yori", "omoi", "."]


def test_tokenizer_keeps_known_hyphenated_surfaces(tokenizer):
    assert tokenizer.tokenize("PC-6082-wa subete-no gakusei") == ["PC-6082", "wa", "subete-no", "gakusei"]
    assert tokenizer.tokenize("70 kg") == ["70", "kg"]
    assert tokenizer.tokenize("Taro-wa se-ga-takai.") == ["Taro", "wa", "se-ga-takai", "."]


def test_tokenizer_reports_unknown_fragments(tokenizer):
    with pytest.raises(UnknownToken) as info:
        tokenizer.tokenize("Taro-wa ooku-no hon-o katta.")
    assert info.value.fragment == "ooku"
    assert info.value.position == 8


def test_merge_multiword():
    merged = merge_multiword(["Jiro", "to", "onaji", "kurai", "no", "omosa", "da"])
    assert merged == ["Jiro", "to-onaji-kurai-no", "omosa", "da"]
    assert merge_multiword(["izyoo", "ni", "yori", "mo"]) == ["izyoo-ni", "yori-mo"]


def test_insert_cmp_only_for_bare_predicates(lexicon):
    assert insert_cmp(["Taro", "wa", "omoi", "."], lexicon) == ["Taro", "wa", "cmp", "omoi", "."]
    assert insert_cmp(["Taro", "wa", "Jiro", "yori", "omoi", "."], lexicon) == ["Taro", "wa", "Jiro", "yori", "omoi", "."]
    assert insert_cmp(["Taro", "wa", "cmp", "omoi"], lexicon) == ["Taro", "wa", "cmp", "omoi"]
    assert insert_cmp(["Taro", "wa", "hon", "o", "katta", "."], lexicon) == ["Taro", "wa", "hon", "o", "katta", "."]


def test_yori_features(lexicon):
    def features(tokens):
        return [t.feature for t in assign_yori_features(tokens, lexicon) if t.feature]

    assert features(["Taro", "wa", "Jiro", "yori", "omoi"]) == ["plain"]
    assert features(["Taro", "wa", "70", "kg", "yori", "omoi"]) == ["measure"]
    assert features(["Taro", "wa", "Jiro", "yori", "5", "kg", "omoi"]) == ["differential"]
    assert features(["Hanako", "ga", "katta", "yori", "takai", "hon", "o", "katta"]) == ["clausal"]
    assert features(["Hanako", "ga", "katta", "no", "yori", "takai", "hon"]) == ["clausal"]
    assert features(["Hanako", "yori", "takai", "hon", "o", "katta"]) == ["phrasal-clausal"]


# Parser

def analyze_tokens(tokenizer, lexicon, sentence):
    return assign_yori_features(insert_cmp(merge_multiword(tokenizer.tokenize(sentence)), lexicon), lexicon)


@pytest.mark.parametrize("sentence", [
    "Taro-wa omoi.",
    "Taro-wa Jiro yori omoi.",
    "Taro-wa 70 kg yori omoi.",
    "Taro-wa Jiro yori 5 kg omoi.",
    "Taro-wa subete-no gakusei yori omoi.",
    "Taro-wa Jiro izyoo-ni omoku nai.",
    "Taro-wa Jiro to onaji kurai-no omosa-da.",
    "Taro-wa Hanako-ga katta yori takai hon-o katta.",
    "Taro-wa Hanako yori takai hon-o katta.",
    "Taro-wa Jiro yori se-ga-hikui.",
])
def test_fragment_sentences_parse(tokenizer, lexicon, sentence):
    tokens = analyze_tokens(tokenizer, lexicon, sentence)
    (best,) = ChartParser(lexicon).parse(tokens)
    assert best.category == C("S")
    assert [leaf.token.surface for leaf in leaves(best)] == surfaces(tokens)


def test_parses_are_ranked_deterministically(tokenizer, lexicon):
    tokens = analyze_tokens(tokenizer, lexicon, "Taro-wa Jiro yori omoi.")
    first = [d.bracket() for d in ChartParser(lexicon).parse(tokens, k=5)]
    second = [d.bracket() for d in ChartParser(lexicon).parse(tokens, k=5)]
    assert first == second


def test_to_tree_keeps_the_token_order(tokenizer, lexicon):
    tokens = analyze_tokens(tokenizer, lexicon, "Taro-wa omoi.")
    tree = to_tree(ChartParser(lexicon).parse(tokens)[0])
    assert isinstance(tree, Tree)
    assert tree.leaves() == surfaces(tokens)


def test_no_parse_reports_fragments(lexicon):
    tokens = [Token("Taro"), Token("Jiro")]
    with pytest.raises(NoParse) as info:
        ChartParser(lexicon).parse(tokens)
    assert info.value.best_fragments


# Rule schemata against a direct structural oracle

def shape(category):
    """Pre-order walk: slashes for functors, (name, features) for atoms."""
    if isinstance(category, Atomic):
        return [(category.name, dict(category.features))]
    return [category.slash] + shape(category.result) + shape(category.argument)


def compatible(a, b):
    left, right = shape(a), shape(b)
    if len(left) != len(right):
        return False
    for x, y in zip(left, right):
        if isinstance(x, str) or isinstance(y, str):
            if x != y:
                return False
        elif x[0] != y[0] or any(y[1][k] != v for k, v in x[1].items() if k in y[1]):
            return False
    return True


# rule: (left slash, right slash, (side, part) unified with (side, part), result slash, result parts)
SCHEMATA = {
    Rule.FA: ("/", None, ("left", "argument"), ("right", None), None, None),
    Rule.BA: (None, "\\", ("right", "argument"), ("left", None), None, None),
    Rule.FC: ("/", "/", ("left", "argument"), ("right", "result"), "/", (("left", "result"), ("right", "argument"))),
    Rule.FCX: ("/", "\\", ("left", "argument"), ("right", "result"), "\\", (("left", "result"), ("right", "argument"))),
    Rule.BC: ("\\", "\\", ("right", "argument"), ("left", "result"), "\\", (("right", "result"), ("left", "argument"))),
    Rule.BCX: ("/", "\\", ("right", "argument"), ("left", "result"), "/", (("right", "result"), ("left", "argument"))),
}


def expected_combination(rule, left, right):
    left_slash, right_slash, first, second, result_slash, parts = SCHEMATA[rule]
    sides = {"left": left, "right": right}
    for side, slash in (("left", left_slash), ("right", right_slash)):
        if slash is not None and (not isinstance(sides[side], Functor) or sides[side].slash != slash):
            return None

    def pick(side, part):
        return sides[side] if part is None else getattr(sides[side], part)

    if not compatible(pick(*first), pick(*second)):
        return None
    if parts is None:
        functor = left if rule is Rule.FA else right
        return functor.result
    return Functor(result_slash, pick(*parts[0]), pick(*parts[1]))


def random_category(rng, depth):
    if depth == 0 or rng.random() < 0.4:
        features = frozenset()
        if rng.random() < 0.4:
            features = frozenset({rng.choice([("case", "nom"), ("case", "acc"), ("pc", "no")])})
        return Atomic(rng.choice(["S", "NP", "NUM"]), features)
    return Functor(rng.choice("/\\"), random_category(rng, depth - 1), random_category(rng, depth - 1))


def random_pair(rng):
    left = random_category(rng, 2)
    if isinstance(left, Functor) and rng.random() < 0.5:
        inner = left.argument if rng.random() < 0.5 else left.result
        right = inner if rng.random() < 0.5 else Functor(rng.choice("/\\"), inner, random_category(rng, 1))
        return (left, right) if rng.random() < 0.5 else (right, left)
    return left, random_category(rng, 2)


def test_rules_agree_with_the_structural_oracle():
    rng = random.Random(5)
    combined = 0
    for _ in range(100):
        left, right = random_pair(rng)
        for rule in Rule:
            expected = expected_combination(rule, left, right)
            assert combine(rule, left, right) == expected, (rule, str(left), str(right))
            combined += expected is not None
    assert combined > 0


# Token rewrites over the bundled sentences

def corpus_sentences():
    sentences = set(GOLDEN.sentence(key) for key in GOLDEN.ids())
    for item in load_dataset():
        sentences.update(item.premises)
        sentences.add(item.hypothesis)
    return sorted(sentences)


def unmerge(tokens):
    joined = {"-".join(pattern): list(pattern) for pattern in MULTIWORD_TABLE}
    return [part for token in tokens for part in joined.get(token, [token])]


@pytest.mark.parametrize("sentence", corpus_sentences())
def test_rewrites_are_idempotent_and_commute(tokenizer, lexicon, sentence):
    try:
        tokens = unmerge(tokenizer.tokenize(sentence))
    except UnknownToken:
        pytest.skip("outside the lexicon")
    merged = merge_multiword(tokens)
    assert merge_multiword(merged) == merged
    inserted = insert_cmp(merged, lexicon)
    assert insert_cmp(inserted, lexicon) == inserted
    assert insert_cmp(merge_multiword(tokens), lexicon) == merge_multiword(insert_cmp(tokens, lexicon))
