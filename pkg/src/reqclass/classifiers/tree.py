"""C4.5-style decision tree over numeric features.

Binary threshold splits (``x <= t`` goes left). For each feature the threshold
with the highest information gain is kept; among features whose gain is at
least the average, the one with the highest gain ratio wins. No pruning: the
minimum leaf size is the only guard against over-fitting.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Hashable, Mapping, Optional, Sequence, Union

import numpy as np

__all__ = ["Leaf", "Split", "DecisionTree", "train_tree", "predict_tree", "entropy", "TreeError"]

_FORMAT = "reqclass.tree"
_VERSION = 1


class TreeError(ValueError):
    pass


def entropy(counts: Sequence[float]) -> float:
    total = float(sum(counts))
    if total <= 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


@dataclass(frozen=True)
class Leaf:
    label: str
    distribution: Mapping[str, int]

    @property
    def n(self) -> int:
        return sum(self.distribution.values())


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain_ratio: float
    left: "Node"
    right: "Node"
    distribution: Mapping[str, int]

    @property
    def n(self) -> int:
        return sum(self.distribution.values())


Node = Union[Leaf, Split]


@dataclass(frozen=True)
class DecisionTree:
    root: Node
    classes: tuple[str, ...]
    n_features: int
    min_leaf: int
    prefer: Optional[str] = None

    def leaves(self) -> list[Leaf]:
        out: list[Leaf] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                out.append(node)
            else:
                stack += [node.right, node.left]
        return out

    def depth(self) -> int:
        def d(node: Node) -> int:
            return 0 if isinstance(node, Leaf) else 1 + max(d(node.left), d(node.right))

        return d(self.root)

    def to_json(self) -> str:
        def enc(node: Node) -> dict:
            if isinstance(node, Leaf):
                return {"leaf": node.label, "distribution": dict(sorted(node.distribution.items()))}
            return {
                "feature": node.feature,
                "threshold": node.threshold,
                "gain_ratio": node.gain_ratio,
                "distribution": dict(sorted(node.distribution.items())),
                "left": enc(node.left),
                "right": enc(node.right),
            }

        doc = {
            "format": _FORMAT,
            "version": _VERSION,
            "classes": list(self.classes),
            "n_features": self.n_features,
            "min_leaf": self.min_leaf,
            "prefer": self.prefer,
            "root": enc(self.root),
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "DecisionTree":
        doc = json.loads(text)
        if doc.get("format") != _FORMAT or doc.get("version") != _VERSION:
            raise TreeError("not a version-1 tree file")

        def dec(obj: dict) -> Node:
            if "leaf" in obj:
                return Leaf(obj["leaf"], obj["distribution"])
            return Split(
                obj["feature"], obj["threshold"], obj["gain_ratio"],
                dec(obj["left"]), dec(obj["right"]), obj["distribution"],
            )

        return cls(dec(doc["root"]), tuple(doc["classes"]), doc["n_features"], doc["min_leaf"], doc["prefer"])


def _majority(dist: Mapping[str, int], prefer: Optional[str]) -> str:
    best = max(dist.values())
    tied = sorted(c for c, n in dist.items() if n == best)
    if prefer is not None and prefer in tied:
        return prefer
    return tied[0]


def _best_threshold(x: np.ndarray, y: np.ndarray, n_classes: int, min_leaf: int, parent_h: float):
    """Highest-gain threshold on one feature: (gain, gain_ratio, threshold) or None."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    n = len(xs)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), ys] = 1.0
    left = np.cumsum(onehot, axis=0)[:-1]  # left counts after position i
    total = left[-1] + onehot[-1]
    right = total - left
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        pl = left / n_left[:, None]
        pr = right / n_right[:, None]
        hl = -np.nansum(np.where(pl > 0, pl * np.log2(pl), 0.0), axis=1)
        hr = -np.nansum(np.where(pr > 0, pr * np.log2(pr), 0.0), axis=1)
    gain = parent_h - (n_left * hl + n_right * hr) / n
    gain = np.where(valid, gain, -np.inf)
    i = int(np.argmax(gain))  # first maximum: lowest threshold
    g = float(gain[i])
    split_info = entropy([n_left[i], n_right[i]])
    ratio = g / split_info if split_info > 0 else 0.0
    threshold = (float(xs[i]) + float(xs[i + 1])) / 2.0
    return g, ratio, threshold


def _grow(X: np.ndarray, y: np.ndarray, classes: tuple[str, ...], min_leaf: int, prefer: Optional[str]) -> Node:
    counts = np.bincount(y, minlength=len(classes))
    dist = {classes[c]: int(n) for c, n in enumerate(counts) if n > 0}
    leaf = Leaf(_majority(dist, prefer), dist)
    if len(dist) == 1 or len(y) < 2 * min_leaf:
        return leaf
    parent_h = entropy(counts)
    candidates = []
    for f in range(X.shape[1]):
        found = _best_threshold(X[:, f], y, len(classes), min_leaf, parent_h)
        if found is not None and found[0] > 1e-12:
            candidates.append((f, *found))
    if not candidates:
        return leaf
    mean_gain = sum(c[1] for c in candidates) / len(candidates)
    eligible = [c for c in candidates if c[1] >= mean_gain - 1e-12]
    f, _, ratio, threshold = max(eligible, key=lambda c: (c[2], -c[0]))
    if ratio <= 0:
        return leaf
    mask = X[:, f] <= threshold
    return Split(
        f,
        threshold,
        ratio,
        _grow(X[mask], y[mask], classes, min_leaf, prefer),
        _grow(X[~mask], y[~mask], classes, min_leaf, prefer),
        dist,
    )


def train_tree(
    X: Sequence[Sequence[float]],
    y: Sequence[Hashable],
    min_leaf: int = 6,
    prefer: Optional[str] = "NFR",
) -> DecisionTree:
    """Grow a tree; ``prefer`` breaks majority ties at leaves."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.size == 0 or len(y) == 0:
        raise TreeError("cannot train a tree on an empty set")
    if arr.ndim != 2 or arr.shape[0] != len(y):
        raise TreeError("feature matrix and labels disagree in length")
    if min_leaf < 1:
        raise TreeError("min_leaf must be at least 1")
    labels = [str(v) for v in y]
    classes = tuple(sorted(set(labels)))
    idx = {c: i for i, c in enumerate(classes)}
    codes = np.array([idx[v] for v in labels], dtype=np.int64)
    root = _grow(arr, codes, classes, min_leaf, prefer)
    return DecisionTree(root, classes, arr.shape[1], min_leaf, prefer)


def predict_tree(tree: DecisionTree, vector: Sequence[float]) -> tuple[str, dict[str, float]]:
    """Descend to a leaf: (label, class distribution normalized to 1)."""
    if len(vector) != tree.n_features:
        raise TreeError(f"expected {tree.n_features} features, got {len(vector)}")
    node = tree.root
    while isinstance(node, Split):
        node = node.left if vector[node.feature] <= node.threshold else node.right
    total = node.n
    return node.label, {c: node.distribution.get(c, 0) / total for c in tree.classes}
