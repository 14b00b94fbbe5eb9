"""Requirement-level term co-occurrence counts."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union

from .tokens import tokenize

__all__ = ["CooccurrenceIndex", "build_cooccurrence", "index_terms"]


def index_terms(text: str, stopwords: frozenset[str] = frozenset()) -> set[str]:
    """Lowercased alphanumeric terms of one requirement, minus stop words."""
    if not text.strip():
        return set()
    return {
        t.lower()
        for t in tokenize(text)
        if any(ch.isalnum() for ch in t) and t.lower() not in stopwords
    }


@dataclass(frozen=True)
class CooccurrenceIndex:
    """``counts[a][b]`` = number of requirements containing both a and b (a != b)."""

    counts: Mapping[str, Mapping[str, int]]

    def co(self, term: str) -> set[str]:
        return set(self.counts.get(term.lower(), ()))

    def co_union(self, terms: Iterable[str]) -> set[str]:
        out: set[str] = set()
        for t in terms:
            out |= self.co(t)
        return out

    def count(self, a: str, b: str) -> int:
        return self.counts.get(a.lower(), {}).get(b.lower(), 0)

    def __contains__(self, term: str) -> bool:
        return term.lower() in self.counts

    def __len__(self) -> int:
        return len(self.counts)


Doc = Union[str, Sequence[str]]


def build_cooccurrence(docs: Iterable[Doc], stopwords: frozenset[str] = frozenset()) -> CooccurrenceIndex:
    """Count co-occurrences with the whole requirement as the window.

    ``docs`` may be raw texts, pre-split term lists, or a :class:`~reqclass.corpus.Corpus`.
    """
    counts: dict[str, Counter[str]] = defaultdict(Counter)
    n_docs = 0
    for doc in docs:
        if hasattr(doc, "text"):
            doc = doc.text  # Requirement
        if isinstance(doc, str):
            terms = index_terms(doc, stopwords)
        else:
            terms = {t.lower() for t in doc if t.lower() not in stopwords}
        n_docs += 1
        for t in terms:
            counts.setdefault(t, Counter())
        for a, b in combinations(sorted(terms), 2):
            counts[a][b] += 1
            counts[b][a] += 1
    if n_docs == 0:
        raise ValueError("cannot build a co-occurrence index from an empty corpus")
    return CooccurrenceIndex({k: dict(v) for k, v in counts.items()})
