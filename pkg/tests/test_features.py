import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reqclass.features import (
    KEYWORD_GROUP_TAGS,
    SYNTACTIC_FEATURES,
    FeatureSpec,
    FeatureSpecError,
    KeywordGroup,
    count_syntactic,
    extract_vector,
    fit_feature_spec,
    keyword_discrimination,
    keyword_score,
    rank_syntactic_features,
)
from reqclass.preprocess import Token, pos_tag, tokenize


def toks(pairs):
    return [Token(w, t) for w, t in pairs]


def test_counts_examples():
    c = count_syntactic(pos_tag(tokenize("The system shall respond quickly")))
    assert (c.adverbs, c.adjectives) == (1, 0)
    c = count_syntactic(toks([("The", "DT"), ("3", "CD"), ("fastest", "JJS"), ("queries", "NNS")]))
    assert (c.cardinals, c.degree_adj_adv) == (1, 1)
    assert count_syntactic([]).as_tuple() == (0, 0, 0, 0, 0)


def test_adverb_verb_window():
    near = toks([("respond", "VB"), ("very", "RB"), ("quickly", "RB")])
    far = toks([("respond", "VB"), ("to", "TO"), ("the", "DT"), ("query", "NN"), ("quickly", "RB")])
    assert count_syntactic(near).adverbs_modifying_verbs == 2
    assert count_syntactic(far).adverbs_modifying_verbs == 0


def test_keyword_scores():
    assert keyword_score(10, 10) == pytest.approx(11 / 12)
    assert keyword_score(5, 10) == 0.5
    assert keyword_score(0, 0) == 0.5


def test_rank_cutoffs():
    docs = [toks([("3", "CD"), ("fast", "JJ")]), toks([("4", "CD")]), toks([("x", "NN")])]
    r = rank_syntactic_features(docs, 0.5)
    assert r.probabilities["cardinals"] == pytest.approx(2 / 3)
    assert r.selected == ("cardinals",)
    assert rank_syntactic_features(docs, 0.0).selected == SYNTACTIC_FEATURES
    # strict: a probability equal to the cutoff is not selected
    assert "cardinals" not in rank_syntactic_features(docs, 2 / 3).selected


def test_keyword_discrimination_selects_extremes():
    nfr = [toks([("secure", "JJ"), ("new", "JJ")])] * 10
    fr = [toks([("new", "JJ"), ("green", "JJ")])] * 10
    g = keyword_discrimination(nfr + fr, ["NFR"] * 10 + ["FR"] * 10, "adjective", 0.7)
    assert dict(g.keywords) == {"secure": pytest.approx(11 / 12), "green": pytest.approx(1 / 12)}
    assert g.nfr_words == {"secure"} and g.fr_words == {"green"}


def test_keyword_discrimination_needs_both_classes():
    with pytest.raises(ValueError):
        keyword_discrimination([toks([("a", "JJ")])], ["NFR"], "adjective")


def test_vector_length_ten():
    spec = FeatureSpec(("cardinals", "adverbs"), tuple(KeywordGroup(k) for k in KEYWORD_GROUP_TAGS))
    assert spec.n_features == 10
    v = extract_vector(toks([("x", "NN")]), spec)
    assert len(v) == 10 and v[2:] == [0.0] * 8


def test_hand_built_vector():
    spec = FeatureSpec(
        ("adverbs", "cardinals"),
        (
            KeywordGroup("modal", (("shall", 0.2), ("must", 0.9))),
            KeywordGroup("adverb", (("quickly", 0.95),)),
        ),
    )
    sentence = toks([("USER", "NNP"), ("must", "MD"), ("respond", "VB"), ("quickly", "RB"), ("5", "CD")])
    assert extract_vector(sentence, spec) == [1.0, 1.0, 1.0, 1.0]
    unsigned = FeatureSpec(spec.selected_syntactic, spec.keyword_groups, signed_keywords=False)
    shall = toks([("It", "PRP"), ("shall", "MD"), ("must", "MD")])
    assert extract_vector(shall, spec)[2] == 0.0  # +1 NFR word, -1 FR word
    assert extract_vector(shall, unsigned)[2] == 2.0


def test_keyword_match_needs_group_tag():
    spec = FeatureSpec((), (KeywordGroup("adverb", (("fast", 0.9),)),))
    assert extract_vector(toks([("fast", "JJ")]), spec) == [0.0]
    assert extract_vector(toks([("fast", "RB")]), spec) == [1.0]


def test_spec_json_round_trip(sample_corpus):
    tagged = [pos_tag(tokenize(r.text)) for r in sample_corpus]
    spec = fit_feature_spec(tagged, sample_corpus.labels)
    again = FeatureSpec.from_json(spec.to_json())
    assert again == spec
    assert again.to_json() == spec.to_json()


def test_spec_validation():
    with pytest.raises(FeatureSpecError):
        FeatureSpec(("colour",), ())
    with pytest.raises(FeatureSpecError):
        FeatureSpec.from_json('{"format": "other"}')
    with pytest.raises(ValueError):
        KeywordGroup("conjunction")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 50), st.integers(0, 50))
def test_score_bounds_and_symmetry(a, b):
    s = keyword_score(a, a + b)
    assert 0 < s < 1
    assert s + keyword_score(b, a + b) == pytest.approx(1.0)
