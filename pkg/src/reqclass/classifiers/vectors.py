"""Vocabulary fitting, document-term vectors and Euclidean distances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = ["Vocabulary", "DocTermVector", "doc_distance", "pairwise_distances", "tfidf"]


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        index = {t: i for i, t in enumerate(self.terms)}
        if len(index) != len(self.terms):
            raise ValueError("vocabulary terms must be unique")
        object.__setattr__(self, "_index", index)

    @classmethod
    def fit(cls, docs: Iterable[Sequence[str]], min_count: int = 1) -> "Vocabulary":
        counts: dict[str, int] = {}
        for doc in docs:
            for term in doc:
                counts[term] = counts.get(term, 0) + 1
        return cls(tuple(sorted(t for t, c in counts.items() if c >= min_count)))

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self._index

    def index(self, term: str) -> int:
        return self._index[term]

    def encode(self, doc: Sequence[str]) -> np.ndarray:
        """Term ids of ``doc`` in order, out-of-vocabulary terms dropped."""
        return np.array([self._index[t] for t in doc if t in self._index], dtype=np.int64)

    def transform(self, docs: Sequence[Sequence[str]]) -> np.ndarray:
        """Raw term-count matrix, one row per document."""
        out = np.zeros((len(docs), len(self.terms)), dtype=np.float64)
        for row, doc in enumerate(docs):
            for t in doc:
                j = self._index.get(t)
                if j is not None:
                    out[row, j] += 1.0
        return out

    def vector(self, doc: Sequence[str]) -> "DocTermVector":
        counts: dict[str, float] = {}
        for t in doc:
            if t in self._index:
                counts[t] = counts.get(t, 0.0) + 1.0
        return DocTermVector(counts, self)


@dataclass(frozen=True)
class DocTermVector:
    coordinates: Mapping[str, float]
    vocabulary: Vocabulary

    def __post_init__(self) -> None:
        for term, weight in self.coordinates.items():
            if term not in self.vocabulary:
                raise ValueError(f"term {term!r} is not in the vocabulary")
            if weight < 0:
                raise ValueError("term weights must be non-negative")

    @property
    def dimension(self) -> int:
        return len(self.vocabulary)

    def dense(self) -> np.ndarray:
        out = np.zeros(len(self.vocabulary))
        for term, weight in self.coordinates.items():
            out[self.vocabulary.index(term)] = weight
        return out


def doc_distance(a: DocTermVector | Sequence[float], b: DocTermVector | Sequence[float]) -> float:
    """Euclidean distance between two documents in the same term space."""
    if isinstance(a, DocTermVector) and isinstance(b, DocTermVector):
        if a.vocabulary != b.vocabulary:
            raise ValueError("vectors come from different vocabularies")
        a, b = a.dense(), b.dense()
    elif isinstance(a, DocTermVector) or isinstance(b, DocTermVector):
        raise ValueError("cannot compare a DocTermVector with a raw array")
    va, vb = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    return float(np.sqrt(np.sum((va - vb) ** 2)))


def pairwise_distances(X: np.ndarray) -> np.ndarray:
    """All-pairs Euclidean distances (exact for integer counts)."""
    X = np.asarray(X, dtype=np.float64)
    sq = np.einsum("ij,ij->i", X, X)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)


def tfidf(counts: np.ndarray) -> np.ndarray:
    """Smoothed tf-idf weighting of a count matrix (optional alternative to raw counts)."""
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.shape[0]
    df = np.count_nonzero(counts, axis=0)
    idf = np.log((1.0 + n) / (1.0 + df)) + 1.0
    return counts * idf
