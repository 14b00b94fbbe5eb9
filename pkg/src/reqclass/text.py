"""Stop words and term extraction shared by co-occurrence counting and term vectors."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .preprocess.tokens import tokenize

__all__ = ["stopwords", "terms"]


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    text = resources.files(__package__).joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))


def terms(text: str, stop: frozenset[str] | None = None) -> list[str]:
    """Lowercased alphanumeric tokens of ``text`` in order, stop words removed."""
    stop = stopwords() if stop is None else stop
    if not text.strip():
        return []
    out = []
    for tok in tokenize(text):
        low = tok.lower()
        if any(ch.isalpha() for ch in low) and low not in stop:
            out.append(low)
    return out
