"""Binarized Naive Bayes: documents are sets of terms, counts are thrown away.

Two likelihood estimates are offered:

``presence`` (default)
    P(w | c) = (df_c(w) + a) / (N_c + 2a), the smoothed probability that a
    class-c document contains w. Only terms present in a document contribute.
``multinomial``
    P(w | c) = (df_c(w) + a) / (sum_w' df_c(w') + a|V|), the multinomial
    model trained on binarized counts.

Either way the posterior is prior * product of P(w | c) over the distinct
in-vocabulary terms of the document, normalized over the classes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

__all__ = ["BnbModel", "train_bnb", "predict_bnb", "binarize", "BnbError"]

_FORMAT = "reqclass.bnb"
_VERSION = 1
_LIKELIHOODS = ("presence", "multinomial")


class BnbError(ValueError):
    pass


def binarize(doc: Sequence[str]) -> tuple[str, ...]:
    """Distinct terms of ``doc`` in first-seen order."""
    return tuple(dict.fromkeys(doc))


@dataclass(frozen=True)
class BnbModel:
    classes: tuple[str, ...]
    vocabulary: tuple[str, ...]
    log_priors: np.ndarray  # (C,)
    log_likelihoods: np.ndarray  # (C, V)
    smoothing: float = 1.0
    likelihood: str = "presence"

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.vocabulary)})

    def to_json(self) -> str:
        doc = {
            "format": _FORMAT,
            "version": _VERSION,
            "classes": list(self.classes),
            "vocabulary": list(self.vocabulary),
            "smoothing": self.smoothing,
            "likelihood": self.likelihood,
            "log_priors": [float(v) for v in self.log_priors],
            "log_likelihoods": [[float(v) for v in row] for row in self.log_likelihoods],
        }
        return json.dumps(doc, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "BnbModel":
        doc = json.loads(text)
        if doc.get("format") != _FORMAT or doc.get("version") != _VERSION:
            raise BnbError("not a version-1 BNB model file")
        return cls(
            tuple(doc["classes"]),
            tuple(doc["vocabulary"]),
            np.array(doc["log_priors"], dtype=np.float64),
            np.array(doc["log_likelihoods"], dtype=np.float64).reshape(len(doc["classes"]), -1),
            doc["smoothing"],
            doc["likelihood"],
        )


def train_bnb(
    docs: Sequence[Sequence[str]],
    labels: Sequence[Hashable],
    smoothing: float = 1.0,
    likelihood: str = "presence",
    classes: Sequence[str] | None = None,
) -> BnbModel:
    """Fit priors and smoothed presence likelihoods.

    ``classes`` names the classes the model must cover; one without training
    documents is an error.
    """
    if len(docs) != len(labels):
        raise BnbError("documents and labels differ in length")
    if not docs:
        raise BnbError("cannot train on an empty corpus")
    if smoothing <= 0:
        raise BnbError("smoothing must be positive")
    if likelihood not in _LIKELIHOODS:
        raise BnbError(f"likelihood must be one of {_LIKELIHOODS}")
    names = [str(lab) for lab in labels]
    present = set(names)
    if classes is not None:
        missing = sorted(set(classes) - present)
        if missing:
            raise BnbError(f"no training documents for class {missing[0]}")
        present |= set(classes)
    classes = tuple(sorted(present))
    vocab = tuple(sorted({t for d in docs for t in d}))
    tindex = {t: i for i, t in enumerate(vocab)}
    cindex = {c: i for i, c in enumerate(classes)}
    df = np.zeros((len(classes), len(vocab)))
    n_docs = np.zeros(len(classes))
    for doc, lab in zip(docs, names):
        c = cindex[lab]
        n_docs[c] += 1
        for t in binarize(doc):
            df[c, tindex[t]] += 1
    if likelihood == "presence":
        denom = n_docs[:, None] + 2 * smoothing
    else:
        denom = df.sum(axis=1, keepdims=True) + smoothing * len(vocab)
    log_lik = np.log(df + smoothing) - np.log(denom)
    log_priors = np.log(n_docs) - math.log(len(docs))
    return BnbModel(classes, vocab, log_priors, log_lik, smoothing, likelihood)


def predict_bnb(model: BnbModel, doc: Sequence[str]) -> tuple[str, dict[str, float]]:
    """(most probable class, posterior over classes). Unknown terms are ignored."""
    ids = [model._index[t] for t in binarize(doc) if t in model._index]
    scores = model.log_priors + model.log_likelihoods[:, ids].sum(axis=1)
    shifted = np.exp(scores - scores.max())
    post = shifted / shifted.sum()
    best = int(np.argmax(scores))  # first maximum: smallest class name
    return model.classes[best], {c: float(p) for c, p in zip(model.classes, post)}
