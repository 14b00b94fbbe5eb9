"""Agglomerative, k-means and hybrid clustering under Euclidean distance.

Cluster ids run from 1 to k and are numbered by the first document (in input
order) that falls into each cluster.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .vectors import pairwise_distances

__all__ = [
    "ClusterModel",
    "ClusterError",
    "Merge",
    "cluster_hierarchical",
    "cluster_kmeans",
    "cluster_hybrid",
    "linkage_merges",
    "cut_merges",
    "within_ss",
]

_FORMAT = "reqclass.clusters"
_VERSION = 1
LINKAGES = ("single", "complete", "average")


class ClusterError(ValueError):
    pass


@dataclass(frozen=True)
class Merge:
    """Clusters ``a`` and ``b`` (scipy-style ids) merged at ``distance``."""

    a: int
    b: int
    distance: float
    size: int


@dataclass(frozen=True)
class ClusterModel:
    method: str
    k: int
    assignments: tuple[int, ...]
    centroids: Optional[np.ndarray] = None
    merges: tuple[Merge, ...] = ()
    objective_history: tuple[float, ...] = field(default=())
    iterations: int = 0

    def members(self, cluster: int) -> list[int]:
        return [i for i, c in enumerate(self.assignments) if c == cluster]

    def to_json(self) -> str:
        doc = {
            "format": _FORMAT,
            "version": _VERSION,
            "method": self.method,
            "k": self.k,
            "assignments": list(self.assignments),
            "centroids": None if self.centroids is None else self.centroids.tolist(),
            "merges": [[m.a, m.b, m.distance, m.size] for m in self.merges],
            "objective_history": list(self.objective_history),
            "iterations": self.iterations,
        }
        return json.dumps(doc, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ClusterModel":
        doc = json.loads(text)
        if doc.get("format") != _FORMAT or doc.get("version") != _VERSION:
            raise ClusterError("not a version-1 cluster model file")
        centroids = None if doc["centroids"] is None else np.array(doc["centroids"], dtype=np.float64)
        return cls(
            doc["method"],
            doc["k"],
            tuple(doc["assignments"]),
            centroids,
            tuple(Merge(int(a), int(b), float(d), int(s)) for a, b, d, s in doc["merges"]),
            tuple(doc["objective_history"]),
            doc["iterations"],
        )


def _check(X: np.ndarray, k: int) -> None:
    if X.ndim != 2 or X.shape[0] == 0:
        raise ClusterError("need a non-empty 2-d vector matrix")
    if k < 1 or k > X.shape[0]:
        raise ClusterError(f"k must lie in [1, {X.shape[0]}], got {k}")


def _renumber(raw: Sequence[int]) -> tuple[int, ...]:
    """Relabel cluster ids 1..k by order of first appearance."""
    mapping: dict[int, int] = {}
    for c in raw:
        if c not in mapping:
            mapping[c] = len(mapping) + 1
    return tuple(mapping[c] for c in raw)


def linkage_merges(X: np.ndarray, linkage: str = "average") -> list[Merge]:
    """Full agglomeration by Lance-Williams updates.

    Ties go to the pair with the smallest flat index in the distance matrix.
    """
    if linkage not in LINKAGES:
        raise ClusterError(f"linkage must be one of {LINKAGES}")
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    D = pairwise_distances(X)
    np.fill_diagonal(D, np.inf)
    size = np.ones(n, dtype=np.int64)
    ids = np.arange(n)  # scipy-style id of the cluster living in each slot
    merges: list[Merge] = []
    for step in range(n - 1):
        flat = int(np.argmin(D))
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        dist = float(D[i, j])
        si, sj = size[i], size[j]
        if linkage == "single":
            new = np.minimum(D[i], D[j])
        elif linkage == "complete":
            new = np.maximum(D[i], D[j])
        else:
            new = (si * D[i] + sj * D[j]) / (si + sj)
        merges.append(Merge(int(ids[i]), int(ids[j]), dist, int(si + sj)))
        # slot i holds the merged cluster, slot j is retired
        D[i, :] = new
        D[:, i] = new
        D[i, i] = np.inf
        D[j, :] = np.inf
        D[:, j] = np.inf
        size[i] = si + sj
        ids[i] = n + step
    return merges


def cut_merges(merges: Sequence[Merge], n: int, k: int) -> tuple[int, ...]:
    """Assignments after the first ``n - k`` merges, numbered 1..k."""
    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for step, m in enumerate(merges[: n - k]):
        parent[find(m.a)] = n + step
        parent[find(m.b)] = n + step
    return _renumber([find(i) for i in range(n)])


def within_ss(X: np.ndarray, assignments: Sequence[int]) -> float:
    """Sum of squared distances of points to their cluster means."""
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(assignments)
    total = 0.0
    for c in np.unique(labels):
        pts = X[labels == c]
        total += float(((pts - pts.mean(axis=0)) ** 2).sum())
    return total


def _means(X: np.ndarray, assignments: Sequence[int], k: int) -> np.ndarray:
    labels = np.asarray(assignments)
    return np.stack([X[labels == c].mean(axis=0) for c in range(1, k + 1)])


def cluster_hierarchical(X: Sequence[Sequence[float]], k: int, linkage: str = "average") -> ClusterModel:
    X = np.asarray(X, dtype=np.float64)
    _check(X, k)
    merges = linkage_merges(X, linkage)
    assignments = cut_merges(merges, X.shape[0], k)
    return ClusterModel(
        f"hierarchical-{linkage}" if linkage != "average" else "hierarchical",
        k,
        assignments,
        _means(X, assignments, k),
        tuple(merges),
        (within_ss(X, assignments),),
    )


def _sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    # explicit differences rather than the Gram expansion, so ties are exact
    return np.stack([((X - c) ** 2).sum(axis=1) for c in C], axis=1)


def _assign(X: np.ndarray, C: np.ndarray, current: Optional[np.ndarray] = None) -> np.ndarray:
    """Nearest centroid; ties keep the current cluster, else the lowest index."""
    d = _sq_dists(X, C)
    labels = np.argmin(d, axis=1)
    if current is not None:
        rows = np.arange(len(X))
        keep = d[rows, current] <= d[rows, labels]
        labels = np.where(keep, current, labels)
    return labels


def _objective(X: np.ndarray, C: np.ndarray, labels: np.ndarray) -> float:
    return float(((X - C[labels]) ** 2).sum())


def _lloyd(X: np.ndarray, centroids: np.ndarray, max_iters: int):
    k = centroids.shape[0]
    C = centroids.copy()
    labels = _assign(X, C)
    history = [_objective(X, C, labels)]
    it = 0
    for it in range(1, max_iters + 1):
        # an empty cluster takes the point farthest from its centroid
        for c in np.flatnonzero(np.bincount(labels, minlength=k) == 0):
            d = ((X - C[labels]) ** 2).sum(axis=1)
            movable = np.bincount(labels, minlength=k)[labels] > 1
            labels[int(np.argmax(np.where(movable, d, -1.0)))] = c
        C = np.stack([X[labels == c].mean(axis=0) for c in range(k)])
        new = _assign(X, C, labels)
        history.append(_objective(X, C, new))
        if np.array_equal(new, labels):
            break
        labels = new
    return labels, C, history, it


def cluster_kmeans(
    X: Sequence[Sequence[float]], k: int = 10, seed: int = 0, max_iters: int = 300
) -> ClusterModel:
    """Lloyd's algorithm from k distinct rows drawn at random (Forgy)."""
    X = np.asarray(X, dtype=np.float64)
    _check(X, k)
    rng = np.random.default_rng(seed)
    init = X[np.sort(rng.choice(X.shape[0], size=k, replace=False))]
    return _finish_kmeans("kmeans", X, init, max_iters)


def _finish_kmeans(method: str, X: np.ndarray, init: np.ndarray, max_iters: int) -> ClusterModel:
    labels, C, history, iters = _lloyd(X, init, max_iters)
    k = init.shape[0]
    # renumber by first appearance, permuting centroids to match
    order: list[int] = []
    for c in labels:
        if c not in order:
            order.append(int(c))
    order += [c for c in range(k) if c not in order]
    remap = {old: new + 1 for new, old in enumerate(order)}
    return ClusterModel(
        method,
        k,
        tuple(remap[int(c)] for c in labels),
        C[order],
        (),
        tuple(history),
        iters,
    )


def cluster_hybrid(
    X: Sequence[Sequence[float]], k: int = 10, max_iters: int = 300, linkage: str = "average"
) -> ClusterModel:
    """k-means started from the cluster means of a hierarchical cut. No randomness."""
    X = np.asarray(X, dtype=np.float64)
    _check(X, k)
    merges = linkage_merges(X, linkage)
    start = cut_merges(merges, X.shape[0], k)
    model = _finish_kmeans("hybrid", X, _means(X, start, k), max_iters)
    return ClusterModel(
        model.method, k, model.assignments, model.centroids, tuple(merges),
        (within_ss(X, start),) + model.objective_history, model.iterations,
    )
