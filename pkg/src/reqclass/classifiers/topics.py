"""LDA and the biterm topic model, both fitted by collapsed Gibbs sampling.

The sweeps are compiled with numba. All randomness comes from a numpy
generator: one uniform draw per token (LDA) or biterm (BTM) per sweep is
generated up front, so a seed fixes the model bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numba
import numpy as np

from .vectors import Vocabulary

__all__ = [
    "LdaModel",
    "BtmModel",
    "TopicModelError",
    "train_lda",
    "train_btm",
    "extract_biterms",
    "lda_sweep_reference",
    "btm_sweep_reference",
]

_LDA_FORMAT = "reqclass.lda"
_BTM_FORMAT = "reqclass.btm"
_VERSION = 1


class TopicModelError(ValueError):
    pass


def _sample(p: np.ndarray, u: float) -> int:
    """Inverse-CDF draw from unnormalized weights ``p``."""
    total = 0.0
    for k in range(p.shape[0]):
        total += p[k]
    target = u * total
    acc = 0.0
    for k in range(p.shape[0]):
        acc += p[k]
        if target < acc:
            return k
    return p.shape[0] - 1


_sample_jit = numba.njit(cache=True)(_sample)


@numba.njit(cache=True)
def _lda_sweep_jit(words, docs, z, ndk, nkw, nk, alpha, beta, vbeta, u):
    K = nk.shape[0]
    p = np.empty(K)
    for i in range(words.shape[0]):
        w, d, k = words[i], docs[i], z[i]
        ndk[d, k] -= 1
        nkw[k, w] -= 1
        nk[k] -= 1
        for t in range(K):
            p[t] = (ndk[d, t] + alpha) * (nkw[t, w] + beta) / (nk[t] + vbeta)
        k = _sample_jit(p, u[i])
        z[i] = k
        ndk[d, k] += 1
        nkw[k, w] += 1
        nk[k] += 1


def lda_sweep_reference(words, docs, z, ndk, nkw, nk, alpha, beta, vbeta, u) -> None:
    """Pure-Python sweep, identical in arithmetic to the compiled one."""
    K = nk.shape[0]
    p = np.empty(K)
    for i in range(words.shape[0]):
        w, d, k = words[i], docs[i], z[i]
        ndk[d, k] -= 1
        nkw[k, w] -= 1
        nk[k] -= 1
        for t in range(K):
            p[t] = (ndk[d, t] + alpha) * (nkw[t, w] + beta) / (nk[t] + vbeta)
        k = _sample(p, u[i])
        z[i] = k
        ndk[d, k] += 1
        nkw[k, w] += 1
        nk[k] += 1


@numba.njit(cache=True)
def _btm_sweep_jit(w1, w2, z, nkw, nk, alpha, beta, vbeta, u):
    K = nk.shape[0]
    p = np.empty(K)
    for i in range(w1.shape[0]):
        a, b, k = w1[i], w2[i], z[i]
        nk[k] -= 1
        nkw[k, a] -= 1
        nkw[k, b] -= 1
        for t in range(K):
            p[t] = (
                (nk[t] + alpha)
                * (nkw[t, a] + beta)
                * (nkw[t, b] + beta)
                / ((2.0 * nk[t] + vbeta) * (2.0 * nk[t] + 1.0 + vbeta))
            )
        k = _sample_jit(p, u[i])
        z[i] = k
        nk[k] += 1
        nkw[k, a] += 1
        nkw[k, b] += 1


def btm_sweep_reference(w1, w2, z, nkw, nk, alpha, beta, vbeta, u) -> None:
    K = nk.shape[0]
    p = np.empty(K)
    for i in range(w1.shape[0]):
        a, b, k = w1[i], w2[i], z[i]
        nk[k] -= 1
        nkw[k, a] -= 1
        nkw[k, b] -= 1
        for t in range(K):
            p[t] = (
                (nk[t] + alpha)
                * (nkw[t, a] + beta)
                * (nkw[t, b] + beta)
                / ((2.0 * nk[t] + vbeta) * (2.0 * nk[t] + 1.0 + vbeta))
            )
        k = _sample(p, u[i])
        z[i] = k
        nk[k] += 1
        nkw[k, a] += 1
        nkw[k, b] += 1


def _check_hyper(K: int, alpha: float, beta: float, iterations: int) -> None:
    if K < 1:
        raise TopicModelError("K must be at least 1")
    if alpha <= 0 or beta <= 0:
        raise TopicModelError("alpha and beta must be positive")
    if iterations < 0:
        raise TopicModelError("iterations must be non-negative")


def _top_words(nkw: np.ndarray, vocab: Vocabulary, n: int) -> list[list[str]]:
    out = []
    for row in nkw:
        order = sorted(range(len(row)), key=lambda j: (-row[j], vocab.terms[j]))
        out.append([vocab.terms[j] for j in order[:n] if row[j] > 0])
    return out


@dataclass(frozen=True)
class LdaModel:
    K: int
    alpha: float
    beta: float
    iterations: int
    seed: int
    vocabulary: Vocabulary
    topic_word_counts: np.ndarray  # (K, V)
    doc_topic_counts: np.ndarray  # (D, K)

    def topic_word(self) -> np.ndarray:
        V = len(self.vocabulary)
        phi = self.topic_word_counts + self.beta
        return phi / (self.topic_word_counts.sum(axis=1, keepdims=True) + V * self.beta)

    def doc_topic(self) -> np.ndarray:
        theta = self.doc_topic_counts + self.alpha
        return theta / theta.sum(axis=1, keepdims=True)

    def dominant_topics(self) -> list[int]:
        return [int(np.argmax(row)) for row in self.doc_topic()]

    def top_words(self, n: int = 10) -> list[list[str]]:
        return _top_words(self.topic_word_counts, self.vocabulary, n)

    def to_json(self) -> str:
        doc = {
            "format": _LDA_FORMAT,
            "version": _VERSION,
            "K": self.K,
            "alpha": self.alpha,
            "beta": self.beta,
            "iterations": self.iterations,
            "seed": self.seed,
            "vocabulary": list(self.vocabulary.terms),
            "topic_word_counts": self.topic_word_counts.tolist(),
            "doc_topic_counts": self.doc_topic_counts.tolist(),
        }
        return json.dumps(doc, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "LdaModel":
        doc = json.loads(text)
        if doc.get("format") != _LDA_FORMAT or doc.get("version") != _VERSION:
            raise TopicModelError("not a version-1 LDA model file")
        return cls(
            doc["K"], doc["alpha"], doc["beta"], doc["iterations"], doc["seed"],
            Vocabulary(tuple(doc["vocabulary"])),
            np.array(doc["topic_word_counts"], dtype=np.int64).reshape(doc["K"], -1),
            np.array(doc["doc_topic_counts"], dtype=np.int64).reshape(-1, doc["K"]),
        )


SweepCallback = Callable[[int, np.ndarray, np.ndarray], None]


def train_lda(
    docs: Sequence[Sequence[str]],
    K: int = 10,
    alpha: Optional[float] = None,
    beta: float = 0.01,
    iterations: int = 1000,
    seed: int = 0,
    callback: Optional[SweepCallback] = None,
    vocabulary: Optional[Vocabulary] = None,
) -> LdaModel:
    """Collapsed Gibbs LDA. ``alpha`` defaults to 50/K.

    ``callback(sweep, topic_word_counts, topic_counts)`` runs after every sweep.
    """
    alpha = 50.0 / K if alpha is None and K > 0 else alpha
    _check_hyper(K, alpha, beta, iterations)
    vocab = vocabulary if vocabulary is not None else Vocabulary.fit(docs)
    if len(vocab) == 0:
        raise TopicModelError("empty vocabulary")
    encoded = [vocab.encode(d) for d in docs]
    words = np.concatenate(encoded) if encoded else np.zeros(0, dtype=np.int64)
    if words.size == 0:
        raise TopicModelError("no in-vocabulary tokens")
    doc_ids = np.concatenate([np.full(len(e), i, dtype=np.int64) for i, e in enumerate(encoded)])
    rng = np.random.default_rng(seed)
    z = rng.integers(0, K, size=words.size, dtype=np.int64)
    V = len(vocab)
    ndk = np.zeros((len(docs), K), dtype=np.int64)
    nkw = np.zeros((K, V), dtype=np.int64)
    np.add.at(ndk, (doc_ids, z), 1)
    np.add.at(nkw, (z, words), 1)
    nk = nkw.sum(axis=1)
    for sweep in range(iterations):
        u = rng.random(words.size)
        _lda_sweep_jit(words, doc_ids, z, ndk, nkw, nk, float(alpha), float(beta), float(V * beta), u)
        if callback is not None:
            callback(sweep, nkw, nk)
    return LdaModel(K, float(alpha), float(beta), iterations, seed, vocab, nkw.copy(), ndk.copy())


def extract_biterms(doc_ids: Sequence[int], window: Optional[int] = None) -> list[tuple[int, int]]:
    """Unordered pairs of distinct terms at positions closer than ``window``.

    ``window=None`` uses the whole document. Pairs are normalized to (min, max).
    """
    out = []
    n = len(doc_ids)
    span = n if window is None else window
    for i in range(n):
        for j in range(i + 1, min(n, i + span)):
            a, b = doc_ids[i], doc_ids[j]
            if a != b:
                out.append((min(a, b), max(a, b)))
    return out


@dataclass(frozen=True)
class BtmModel:
    K: int
    alpha: float
    beta: float
    iterations: int
    seed: int
    window: Optional[int]
    vocabulary: Vocabulary
    topic_word_counts: np.ndarray  # (K, V), each biterm counts both words
    topic_counts: np.ndarray  # (K,) biterms per topic
    biterm_topics: np.ndarray  # (B,)
    doc_topic_dist: np.ndarray  # (D, K)

    def topic_word(self) -> np.ndarray:
        V = len(self.vocabulary)
        return (self.topic_word_counts + self.beta) / (2.0 * self.topic_counts[:, None] + V * self.beta)

    def topic_prior(self) -> np.ndarray:
        return (self.topic_counts + self.alpha) / (self.topic_counts.sum() + self.K * self.alpha)

    def doc_topic(self) -> np.ndarray:
        return self.doc_topic_dist

    def dominant_topics(self) -> list[int]:
        return [int(np.argmax(row)) for row in self.doc_topic_dist]

    def top_words(self, n: int = 10) -> list[list[str]]:
        return _top_words(self.topic_word_counts, self.vocabulary, n)

    def to_json(self) -> str:
        doc = {
            "format": _BTM_FORMAT,
            "version": _VERSION,
            "K": self.K,
            "alpha": self.alpha,
            "beta": self.beta,
            "iterations": self.iterations,
            "seed": self.seed,
            "window": self.window,
            "vocabulary": list(self.vocabulary.terms),
            "topic_word_counts": self.topic_word_counts.tolist(),
            "topic_counts": self.topic_counts.tolist(),
            "biterm_topics": self.biterm_topics.tolist(),
            "doc_topic": self.doc_topic_dist.tolist(),
        }
        return json.dumps(doc, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "BtmModel":
        doc = json.loads(text)
        if doc.get("format") != _BTM_FORMAT or doc.get("version") != _VERSION:
            raise TopicModelError("not a version-1 BTM model file")
        return cls(
            doc["K"], doc["alpha"], doc["beta"], doc["iterations"], doc["seed"], doc["window"],
            Vocabulary(tuple(doc["vocabulary"])),
            np.array(doc["topic_word_counts"], dtype=np.int64).reshape(doc["K"], -1),
            np.array(doc["topic_counts"], dtype=np.int64),
            np.array(doc["biterm_topics"], dtype=np.int64),
            np.array(doc["doc_topic"], dtype=np.float64).reshape(-1, doc["K"]),
        )


def _btm_doc_topics(
    encoded: Sequence[np.ndarray],
    biterms: Sequence[list[tuple[int, int]]],
    theta: np.ndarray,
    phi: np.ndarray,
) -> np.ndarray:
    """P(z | d) = sum over the doc's biterms of P(z | b) P(b | d), P(b | d) uniform."""
    out = np.zeros((len(encoded), theta.shape[0]))
    for d, (ids, bts) in enumerate(zip(encoded, biterms)):
        if bts:
            pairs = np.array(bts, dtype=np.int64)
            pzb = theta[None, :] * phi[:, pairs[:, 0]].T * phi[:, pairs[:, 1]].T
            pzb /= pzb.sum(axis=1, keepdims=True)
            out[d] = pzb.mean(axis=0)
        elif len(ids):
            pz = theta * phi[:, ids[0]]
            out[d] = pz / pz.sum()
        else:
            out[d] = theta
    return out


def train_btm(
    docs: Sequence[Sequence[str]],
    K: int = 10,
    alpha: Optional[float] = None,
    beta: float = 0.01,
    iterations: int = 1000,
    seed: int = 0,
    window: Optional[int] = None,
    callback: Optional[SweepCallback] = None,
) -> BtmModel:
    """Biterm topic model; ``window=None`` pairs every two terms of a document."""
    alpha = 50.0 / K if alpha is None and K > 0 else alpha
    _check_hyper(K, alpha, beta, iterations)
    vocab = Vocabulary.fit(docs)
    encoded = [vocab.encode(d) for d in docs]
    per_doc = [extract_biterms(e.tolist(), window) for e in encoded]
    flat = [b for bts in per_doc for b in bts]
    if not flat:
        raise TopicModelError("no biterms: every document has fewer than two distinct terms")
    w1 = np.array([a for a, _ in flat], dtype=np.int64)
    w2 = np.array([b for _, b in flat], dtype=np.int64)
    V = len(vocab)
    rng = np.random.default_rng(seed)
    z = rng.integers(0, K, size=len(flat), dtype=np.int64)
    nkw = np.zeros((K, V), dtype=np.int64)
    np.add.at(nkw, (z, w1), 1)
    np.add.at(nkw, (z, w2), 1)
    nk = np.bincount(z, minlength=K).astype(np.int64)
    for sweep in range(iterations):
        u = rng.random(len(flat))
        _btm_sweep_jit(w1, w2, z, nkw, nk, float(alpha), float(beta), float(V * beta), u)
        if callback is not None:
            callback(sweep, nkw, nk)
    theta = (nk + alpha) / (nk.sum() + K * alpha)
    phi = (nkw + beta) / (2.0 * nk[:, None] + V * beta)
    doc_topic = _btm_doc_topics(encoded, per_doc, theta, phi)
    return BtmModel(
        K, float(alpha), float(beta), iterations, seed, window, vocab,
        nkw.copy(), nk.copy(), z.copy(), doc_topic,
    )
