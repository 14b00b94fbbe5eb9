import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.cluster.hierarchy import fcluster, linkage

from reqclass.classifiers import (
    ClusterError,
    ClusterModel,
    assign_cluster_labels,
    assign_labels,
    cluster_hierarchical,
    cluster_hybrid,
    cluster_kmeans,
)
from reqclass.classifiers.clustering import linkage_merges, within_ss
from reqclass.classifiers.labels import LabelMap, majority_label


def blobs(spread=0.01, gap=100.0):
    a = np.array([[0.0, 0.0], [spread, 0.0], [0.0, spread]])
    return np.vstack([a, a + gap])


def same_partition(x, y):
    return len(set(zip(x, y))) == len(set(x)) == len(set(y))


def test_hierarchical_recovers_blobs():
    m = cluster_hierarchical(blobs(), 2)
    assert m.assignments == (1, 1, 1, 2, 2, 2)


def test_hierarchical_extremes():
    X = np.random.default_rng(0).random((7, 3))
    assert sorted(cluster_hierarchical(X, 7).assignments) == list(range(1, 8))
    assert set(cluster_hierarchical(X, 1).assignments) == {1}


@pytest.mark.parametrize("method", ["single", "complete", "average"])
def test_linkage_matches_scipy(method):
    X = np.random.default_rng(5).random((25, 4))
    ours = linkage_merges(X, method)
    ref = linkage(X, method=method)
    assert np.allclose([m.distance for m in ours], ref[:, 2])
    assert [m.size for m in ours] == ref[:, 3].astype(int).tolist()
    for k in (2, 4, 7):
        mine = cluster_hierarchical(X, k, method).assignments
        theirs = fcluster(ref, k, criterion="maxclust")
        assert same_partition(mine, theirs)


def test_kmeans_recovers_blobs_from_any_seed():
    for seed in range(10):
        m = cluster_kmeans(blobs(), 2, seed=seed)
        assert same_partition(m.assignments, (1, 1, 1, 2, 2, 2))


def test_kmeans_k1_centroid_is_mean():
    X = np.random.default_rng(1).random((9, 3))
    m = cluster_kmeans(X, 1)
    assert np.allclose(m.centroids[0], X.mean(axis=0))


def test_kmeans_duplicates_repair_empty_cluster():
    X = np.array([[1.0, 1.0]] * 4 + [[1.0, 1.0 + 1e-9]])
    m = cluster_kmeans(X, 2, seed=0)
    assert set(m.assignments) == {1, 2}


def test_hybrid_deterministic_and_k1():
    X = np.random.default_rng(2).random((30, 4))
    a, b = cluster_hybrid(X, 4), cluster_hybrid(X, 4)
    assert a.to_json() == b.to_json()
    assert cluster_hybrid(X, 1).assignments == cluster_kmeans(X, 1).assignments
    assert same_partition(cluster_hybrid(blobs(), 2).assignments, (1, 1, 1, 2, 2, 2))


def test_ids_numbered_by_first_appearance():
    X = np.random.default_rng(3).random((20, 2))
    for m in (cluster_hierarchical(X, 4), cluster_kmeans(X, 4, seed=1), cluster_hybrid(X, 4)):
        firsts = []
        for c in m.assignments:
            if c not in firsts:
                firsts.append(c)
        assert firsts == sorted(firsts) == list(range(1, 5))


def test_bad_k():
    with pytest.raises(ClusterError):
        cluster_kmeans(np.zeros((3, 2)), 4)
    with pytest.raises(ClusterError):
        cluster_hierarchical(np.zeros((3, 2)), 0)


def test_cluster_json_round_trip():
    X = np.random.default_rng(4).random((12, 3))
    for m in (cluster_hierarchical(X, 3), cluster_kmeans(X, 3), cluster_hybrid(X, 3)):
        again = ClusterModel.from_json(m.to_json())
        assert again.to_json() == m.to_json()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 6), st.integers(10, 40))
def test_kmeans_objective_non_increasing(seed, k, n):
    X = np.random.default_rng(seed).integers(0, 3, size=(n, 5)).astype(float)
    m = cluster_kmeans(X, k, seed=seed)
    h = np.array(m.objective_history)
    assert (np.diff(h) <= 1e-9).all()
    assert within_ss(X, m.assignments) == pytest.approx(h[-1])
    hy = cluster_hybrid(X, k)
    assert (np.diff(hy.objective_history) <= 1e-9).all()


# -- label mapping -----------------------------------------------------------------


def test_majority_and_ties():
    assert majority_label(["SE", "SE", "US"]) == "SE"
    assert majority_label(["US", "SE"]) == "SE"


def test_assign_labels_with_empty_group():
    lm = assign_labels([1, 1, 2], ["SE", "SE", "US"], all_groups=range(1, 4))
    assert lm.mapping == {1: "SE", 2: "US", 3: "SE"}
    assert lm.predict([3, 2]) == ["SE", "US"]
    assert LabelMap.from_json(lm.to_json()) == lm


def test_cluster_label_map():
    m = cluster_hierarchical(blobs(), 2)
    lm = assign_cluster_labels(m, ["SE", "SE", "PE", "US", "US", "US"])
    assert lm.predict(m.assignments) == ["SE"] * 3 + ["US"] * 3
