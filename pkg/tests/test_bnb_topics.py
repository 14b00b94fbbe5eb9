import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reqclass.classifiers import (
    BnbError,
    BnbModel,
    BtmModel,
    LdaModel,
    TopicModelError,
    extract_biterms,
    predict_bnb,
    train_bnb,
    train_btm,
    train_lda,
)
from reqclass.classifiers.topics import (
    _btm_sweep_jit,
    _lda_sweep_jit,
    btm_sweep_reference,
    lda_sweep_reference,
)

# -- binarized naive bayes ---------------------------------------------------------


def test_hand_computed_posterior():
    model = train_bnb([["a", "b"], ["c"]], ["X", "Y"])
    label, post = predict_bnb(model, ["a"])
    assert label == "X"
    assert post["X"] == pytest.approx(2 / 3, abs=1e-12)


def test_counts_are_binarized():
    once = train_bnb([["a", "b"], ["c"]], ["X", "Y"])
    many = train_bnb([["a", "a", "a", "b"], ["c", "c"]], ["X", "Y"])
    assert np.array_equal(once.log_likelihoods, many.log_likelihoods)
    assert predict_bnb(once, ["a", "a"]) == predict_bnb(once, ["a"])


def test_single_class_posterior_one():
    model = train_bnb([["a"], ["b"]], ["SE", "SE"])
    assert predict_bnb(model, ["zz", "a"]) == ("SE", {"SE": 1.0})


def test_unknown_terms_fall_back_to_priors():
    model = train_bnb([["a"], ["b"], ["c"]], ["X", "Y", "Y"])
    label, post = predict_bnb(model, ["never", "seen"])
    assert label == "Y"
    assert post["Y"] == pytest.approx(2 / 3)


def test_missing_required_class():
    with pytest.raises(BnbError):
        train_bnb([["a"]], ["X"], classes=["X", "Y"])
    with pytest.raises(BnbError):
        train_bnb([], [])


def test_multinomial_variant():
    model = train_bnb([["a", "b"], ["c"]], ["X", "Y"], likelihood="multinomial")
    # P(a|X) = 2/5, P(a|Y) = 1/4 over V = {a, b, c}
    _, post = predict_bnb(model, ["a"])
    expected = (0.5 * 2 / 5) / (0.5 * 2 / 5 + 0.5 * 1 / 4)
    assert post["X"] == pytest.approx(expected, abs=1e-12)


def test_bnb_json_round_trip():
    model = train_bnb([["a", "b"], ["c"], ["b", "c"]], ["X", "Y", "Y"])
    again = BnbModel.from_json(model.to_json())
    assert again.to_json() == model.to_json()
    assert predict_bnb(again, ["b"]) == predict_bnb(model, ["b"])


words = st.sampled_from(list("abcdefg"))


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.tuples(st.lists(words, min_size=1, max_size=5), st.sampled_from(["X", "Y", "Z"])), min_size=1, max_size=12),
    st.lists(st.sampled_from(list("abcdefghij")), max_size=6),
)
def test_posterior_matches_brute_force(train, doc):
    docs, labels = [d for d, _ in train], [c for _, c in train]
    model = train_bnb(docs, labels)
    label, post = predict_bnb(model, doc)
    vocab = {w for d in docs for w in d}
    scores = {}
    for c in sorted(set(labels)):
        members = [set(d) for d, lab in zip(docs, labels) if lab == c]
        s = math.log(len(members) / len(docs))
        for w in dict.fromkeys(doc):
            if w in vocab:
                s += math.log((sum(w in m for m in members) + 1) / (len(members) + 2))
        scores[c] = s
    top = max(scores.values())
    z = sum(math.exp(s - top) for s in scores.values())
    assert sum(post.values()) == pytest.approx(1.0, abs=1e-12)
    for c, s in scores.items():
        assert post[c] == pytest.approx(math.exp(s - top) / z, abs=1e-12)
    assert scores[label] == pytest.approx(top, abs=1e-12)


# -- topic models ----------------------------------------------------------------------

VOCAB_A = ["login", "password", "encrypt", "secure", "access", "token"]
VOCAB_B = ["screen", "colour", "font", "layout", "button", "icon"]


def disjoint_corpus(n=40, length=8, seed=0):
    rng = np.random.default_rng(seed)
    docs = []
    for i in range(n):
        vocab = VOCAB_A if i % 2 == 0 else VOCAB_B
        docs.append(list(rng.choice(vocab, size=length)))
    return docs


def purity(top_words, n=5):
    best = []
    for words in top_words:
        head = words[:n]
        best.append(max(sum(w in VOCAB_A for w in head), sum(w in VOCAB_B for w in head)) / len(head))
    return min(best)


# alpha is set explicitly: the 50/K default outweighs eight-token documents
@pytest.mark.parametrize("seed", range(5))
def test_lda_disjoint_purity(seed):
    model = train_lda(disjoint_corpus(seed=seed), K=2, alpha=0.1, iterations=200, seed=seed)
    assert purity(model.top_words()) >= 0.9
    dom = model.dominant_topics()
    assert len(set(dom[0::2])) == 1 and len(set(dom[1::2])) == 1 and dom[0] != dom[1]


@pytest.mark.parametrize("seed", range(5))
def test_btm_disjoint_purity(seed):
    model = train_btm(disjoint_corpus(seed=seed), K=2, alpha=0.1, iterations=200, seed=seed)
    assert purity(model.top_words()) >= 0.9


def test_lda_conservation_every_sweep():
    docs = disjoint_corpus(20, 6)
    n_tokens = sum(len(d) for d in docs)

    def check(sweep, nkw, nk):
        assert (nkw >= 0).all() and (nk >= 0).all()
        assert nkw.sum() == n_tokens
        assert np.array_equal(nkw.sum(axis=1), nk)

    model = train_lda(docs, K=3, iterations=100, seed=4, callback=check)
    assert model.doc_topic_counts.sum() == n_tokens
    assert np.array_equal(model.doc_topic_counts.sum(axis=1), [len(d) for d in docs])


def test_btm_conservation_every_sweep():
    docs = disjoint_corpus(20, 6)
    n_biterms = sum(len(extract_biterms(list(range(len(d))))) for d in docs)

    def check(sweep, nkw, nk):
        assert (nkw >= 0).all() and (nk >= 0).all()
        assert np.array_equal(nkw.sum(axis=1), 2 * nk)

    model = train_btm(docs, K=3, iterations=100, seed=4, callback=check)
    assert model.topic_counts.sum() == len(model.biterm_topics) <= n_biterms
    assert np.allclose(model.doc_topic().sum(axis=1), 1.0)


def test_compiled_sweeps_equal_reference():
    rng = np.random.default_rng(7)
    K, V, D, N = 3, 10, 5, 60
    words = rng.integers(0, V, N)
    docs = rng.integers(0, D, N)
    z = rng.integers(0, K, N)
    ndk = np.zeros((D, K), dtype=np.int64)
    nkw = np.zeros((K, V), dtype=np.int64)
    np.add.at(ndk, (docs, z), 1)
    np.add.at(nkw, (z, words), 1)
    nk = nkw.sum(axis=1)
    state_a = [z.copy(), ndk.copy(), nkw.copy(), nk.copy()]
    state_b = [z.copy(), ndk.copy(), nkw.copy(), nk.copy()]
    for _ in range(5):
        u = rng.random(N)
        _lda_sweep_jit(words, docs, *state_a, 0.5, 0.01, V * 0.01, u)
        lda_sweep_reference(words, docs, *state_b, 0.5, 0.01, V * 0.01, u)
    for a, b in zip(state_a, state_b):
        assert np.array_equal(a, b)

    w1 = rng.integers(0, V // 2, N)
    w2 = rng.integers(V // 2, V, N)
    z = rng.integers(0, K, N)
    nkw = np.zeros((K, V), dtype=np.int64)
    np.add.at(nkw, (z, w1), 1)
    np.add.at(nkw, (z, w2), 1)
    nk = np.bincount(z, minlength=K).astype(np.int64)
    sa = [z.copy(), nkw.copy(), nk.copy()]
    sb = [z.copy(), nkw.copy(), nk.copy()]
    for _ in range(5):
        u = rng.random(N)
        _btm_sweep_jit(w1, w2, *sa, 0.5, 0.01, V * 0.01, u)
        btm_sweep_reference(w1, w2, *sb, 0.5, 0.01, V * 0.01, u)
    for a, b in zip(sa, sb):
        assert np.array_equal(a, b)


def test_same_seed_same_model():
    docs = disjoint_corpus(10, 5)
    assert train_lda(docs, K=2, iterations=20, seed=3).to_json() == train_lda(docs, K=2, iterations=20, seed=3).to_json()
    assert train_btm(docs, K=2, iterations=20, seed=3).to_json() == train_btm(docs, K=2, iterations=20, seed=3).to_json()


def test_k1_degenerate():
    model = train_lda(disjoint_corpus(6, 4), K=1, iterations=5)
    assert model.dominant_topics() == [0] * 6
    assert np.allclose(model.doc_topic(), 1.0)


def test_biterms():
    assert sorted(extract_biterms([0, 1, 2])) == [(0, 1), (0, 2), (1, 2)]
    assert extract_biterms([2, 1], window=3) == [(1, 2)]
    assert extract_biterms([0, 1, 2], window=2) == [(0, 1), (1, 2)]
    assert extract_biterms([4, 4]) == []


def test_btm_needs_biterms():
    with pytest.raises(TopicModelError):
        train_btm([["a"], ["b"], ["c", "c"]], K=2, iterations=1)


def test_topic_json_round_trip():
    docs = disjoint_corpus(8, 4)
    lda = train_lda(docs, K=2, iterations=10)
    assert LdaModel.from_json(lda.to_json()).to_json() == lda.to_json()
    btm = train_btm(docs, K=2, iterations=10)
    assert BtmModel.from_json(btm.to_json()).to_json() == btm.to_json()


def test_hyperparameter_checks():
    with pytest.raises(TopicModelError):
        train_lda([["a"]], K=0)
    with pytest.raises(TopicModelError):
        train_lda([["a"]], K=2, beta=0)
    assert train_lda([["a", "b"]], K=5, iterations=1).alpha == 10.0
