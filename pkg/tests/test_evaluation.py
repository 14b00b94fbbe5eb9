import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reqclass.corpus import FoldPlan
from reqclass.evaluation import (
    ConfusionMatrix,
    FoldError,
    UndefinedMetricWarning,
    confusion,
    cross_validate,
    hopkins,
    hopkins_mean,
    kappa,
    metrics,
    normalize_confusion,
    silhouette,
)


def test_confusion_rows_are_predicted():
    m = confusion(["X", "X"], ["X", "Y"], ["X", "Y"])
    assert m.counts.tolist() == [[1, 1], [0, 0]]
    assert m["X", "Y"] == 1
    assert confusion(["X", "X"], ["X", "X"], ["X", "Y"]).counts.tolist() == [[2, 0], [0, 0]]


def test_confusion_rejects_unknown_label():
    with pytest.raises(ValueError):
        confusion(["Z"], ["X"], ["X", "Y"])
    with pytest.raises(ValueError):
        confusion(["X"], ["X", "Y"])


def test_hand_kappa():
    m = ConfusionMatrix(("A", "B"), np.array([[20, 5], [10, 15]]))
    # p_o = 0.7, p_e = (25*30 + 25*20) / 2500 = 0.5
    assert kappa(m) == pytest.approx(0.4)


def test_kappa_undefined_when_chance_is_certain():
    assert kappa(ConfusionMatrix(("A", "B"), np.array([[4, 0], [0, 0]]))) is None


def test_normalize_rows():
    m = ConfusionMatrix(("A", "B"), np.array([[2, 2], [0, 4]]))
    assert normalize_confusion(m).tolist() == [[0.5, 0.5], [0.0, 1.0]]
    empty = ConfusionMatrix(("A", "B"), np.array([[0, 0], [1, 3]]))
    assert normalize_confusion(empty)[0].tolist() == [0.0, 0.0]


def test_perfect_three_class():
    y = ["A", "B", "C", "A", "B", "C"]
    r = metrics(confusion(y, y))
    assert r.accuracy == r.kappa == r.weighted_f1 == 1.0
    assert all(m.precision == m.recall == 1.0 for m in r.per_class.values())


def test_undefined_precision_is_none_and_noted():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        r = metrics(confusion(["A", "A"], ["A", "B"], ["A", "B"]))
    assert r.per_class["B"].precision is None and r.per_class["B"].f1 is None
    assert r.per_class["B"].recall == 0.0
    assert any(issubclass(w.category, UndefinedMetricWarning) for w in caught)
    assert r.notes
    assert r.to_dict()["per_class"]["B"]["precision"] is None
    assert ",," in r.to_csv()


def _brute(preds, truth, classes):
    n = len(truth)
    out = {}
    for c in classes:
        tp = sum(p == c and t == c for p, t in zip(preds, truth))
        npred = sum(p == c for p in preds)
        nact = sum(t == c for t in truth)
        out[c] = (tp / npred if npred else None, tp / nact if nact else None, nact)
    p_o = sum(p == t for p, t in zip(preds, truth)) / n
    p_e = sum(sum(p == c for p in preds) * sum(t == c for t in truth) for c in classes) / n**2
    k = None if p_e == 1 else (p_o - p_e) / (1 - p_e)
    return out, p_o, k


@settings(max_examples=500, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("ABC"), st.sampled_from("ABC")), min_size=1, max_size=30))
def test_metrics_match_brute_force(pairs):
    preds, truth = [p for p, _ in pairs], [t for _, t in pairs]
    classes = ("A", "B", "C")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UndefinedMetricWarning)
        r = metrics(confusion(preds, truth, classes))
    per, acc, k = _brute(preds, truth, classes)
    assert r.accuracy == pytest.approx(acc)
    assert r.kappa == pytest.approx(k) if k is not None else r.kappa is None
    for c, (p, rec, support) in per.items():
        m = r.per_class[c]
        assert m.support == support
        assert m.precision == pytest.approx(p) if p is not None else m.precision is None
        assert m.recall == pytest.approx(rec) if rec is not None else m.recall is None
    kept = [(per[c][1], per[c][2]) for c in classes if per[c][2] and per[c][1] is not None]
    expected = sum(r_ * s for r_, s in kept) / sum(s for _, s in kept)
    assert r.weighted_recall == pytest.approx(expected)


def _loo(ids):
    return FoldPlan(len(ids), 1, 0, ({rid: i for i, rid in enumerate(ids)},))


def test_leave_one_out_matches_manual_loop():
    labels = ["A", "A", "B", "B", "A", "B", "A"]
    ids = [f"r{i}" for i in range(len(labels))]

    def majority(train, test):
        votes = [labels[i] for i in train]
        top = max(sorted(set(votes)), key=votes.count)
        return [top] * len(test)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UndefinedMetricWarning)
        res = cross_validate(labels, ids, _loo(ids), majority)
    manual = []
    for i in range(len(labels)):
        manual += majority([j for j in range(len(labels)) if j != i], [i])
    assert list(res.predictions[0]) == manual
    assert res.pooled.matrix == confusion(manual, labels)


def test_fold_error_when_class_missing_from_training():
    labels = ["A", "A", "B"]
    ids = ["a", "b", "c"]
    with pytest.raises(FoldError) as info:
        cross_validate(labels, ids, _loo(ids), lambda tr, te: ["A"] * len(te))
    assert info.value.label == "B" and info.value.fold == 2


def test_pooled_over_runs():
    labels = ["A", "B"] * 4
    ids = [str(i) for i in range(8)]
    plan = FoldPlan(2, 3, 0, tuple({rid: (i // 2) % 2 for i, rid in enumerate(ids)} for _ in range(3)))
    res = cross_validate(labels, ids, plan, lambda tr, te: [labels[i] for i in te])
    assert res.pooled.matrix.total == 24 and len(res.per_run) == 3
    assert res.pooled.accuracy == 1.0


# -- cluster diagnostics -------------------------------------------------------------


def test_hopkins_uniform_near_half():
    X = np.random.default_rng(0).random((400, 2))
    assert hopkins_mean(X, seeds=20) == pytest.approx(0.5, abs=0.08)


def test_hopkins_blobs_low():
    rng = np.random.default_rng(1)
    X = np.vstack([rng.normal(0, 0.01, (100, 2)), rng.normal(10, 0.01, (100, 2))])
    assert hopkins(X, seed=3) < 0.15


def test_hopkins_input_checks():
    with pytest.raises(ValueError):
        hopkins(np.zeros((5, 2)))
    with pytest.raises(ValueError):
        hopkins(np.ones((20, 2)))


def test_silhouette_blobs_and_equidistant():
    rng = np.random.default_rng(2)
    X = np.vstack([rng.normal(0, 0.01, (20, 2)), rng.normal(10, 0.01, (20, 2))])
    assert silhouette(X, [1] * 20 + [2] * 20).mean > 0.9
    # corners of a regular simplex: every distance is equal
    E = np.eye(4)
    assert silhouette(E, [1, 1, 2, 2]).mean == pytest.approx(0.0)


def test_silhouette_matches_sklearn():
    from sklearn.metrics import silhouette_score

    rng = np.random.default_rng(3)
    X = rng.random((30, 3))
    lab = rng.integers(1, 4, 30)
    assert silhouette(X, lab).mean == pytest.approx(silhouette_score(X, lab))
