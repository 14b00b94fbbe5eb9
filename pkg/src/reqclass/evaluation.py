"""Confusion matrices, P/R/F1, kappa, cluster diagnostics and cross-validation.

Confusion matrices follow the layout rows = predicted, columns = actual.
Undefined statistics (a zero denominator) are ``None`` rather than 0.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Optional, Sequence

import numpy as np

from .classifiers.vectors import pairwise_distances
from .corpus import FoldPlan

__all__ = [
    "ConfusionMatrix",
    "ClassMetrics",
    "EvalReport",
    "CVResult",
    "FoldError",
    "UndefinedMetricWarning",
    "confusion",
    "metrics",
    "kappa",
    "normalize_confusion",
    "cross_validate",
    "hopkins",
    "hopkins_mean",
    "silhouette",
    "SilhouetteResult",
]


class FoldError(ValueError):
    def __init__(self, run: int, fold: int, label: str):
        self.run, self.fold, self.label = run, fold, label
        super().__init__(f"run {run} fold {fold}: training part has no instance of class {label}")


class UndefinedMetricWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    classes: tuple[str, ...]
    counts: np.ndarray  # [predicted, actual]

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (len(self.classes), len(self.classes)):
            raise ValueError("confusion counts must be square over the classes")
        if (counts < 0).any():
            raise ValueError("confusion counts must be non-negative")
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __getitem__(self, key: tuple[str, str]) -> int:
        p, a = key
        return int(self.counts[self.classes.index(p), self.classes.index(a)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self.classes == other.classes and np.array_equal(self.counts, other.counts)

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if self.classes != other.classes:
            raise ValueError("cannot add confusion matrices over different classes")
        return ConfusionMatrix(self.classes, self.counts + other.counts)

    def to_csv(self, normalized: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["predicted\\actual", *self.classes])
        table = normalize_confusion(self) if normalized else self.counts
        for c, row in zip(self.classes, table):
            w.writerow([c, *(_fmt(v) for v in row)])
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6f}"


def confusion(
    predictions: Sequence[Hashable], truth: Sequence[Hashable], classes: Optional[Sequence[str]] = None
) -> ConfusionMatrix:
    if len(predictions) != len(truth):
        raise ValueError(f"{len(predictions)} predictions for {len(truth)} true labels")
    pred = [str(p) for p in predictions]
    act = [str(t) for t in truth]
    names = tuple(classes) if classes is not None else tuple(sorted(set(pred) | set(act)))
    index = {c: i for i, c in enumerate(names)}
    counts = np.zeros((len(names), len(names)), dtype=np.int64)
    for p, a in zip(pred, act):
        if p not in index or a not in index:
            raise ValueError(f"label {p if p not in index else a!r} is not among the classes")
        counts[index[p], index[a]] += 1
    return ConfusionMatrix(names, counts)


@dataclass(frozen=True)
class ClassMetrics:
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    support: int


def _f1(p: Optional[float], r: Optional[float]) -> Optional[float]:
    if p is None or r is None:
        return None
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def kappa(matrix: ConfusionMatrix) -> Optional[float]:
    """Cohen's kappa; ``None`` when chance agreement is 1."""
    n = matrix.total
    if n == 0:
        raise ValueError("kappa of an empty matrix")
    c = matrix.counts.astype(np.float64)
    p_o = np.trace(c) / n
    p_e = float((c.sum(axis=1) * c.sum(axis=0)).sum()) / (n * n)
    if p_e == 1.0:
        return None
    return (p_o - p_e) / (1.0 - p_e)


def normalize_confusion(matrix: ConfusionMatrix) -> np.ndarray:
    """Each non-empty row divided by its sum."""
    c = matrix.counts.astype(np.float64)
    sums = c.sum(axis=1, keepdims=True)
    return np.divide(c, sums, out=np.zeros_like(c), where=sums > 0)


@dataclass(frozen=True)
class EvalReport:
    matrix: ConfusionMatrix
    per_class: Mapping[str, ClassMetrics]
    weighted_precision: Optional[float]
    weighted_recall: Optional[float]
    weighted_f1: Optional[float]
    accuracy: float
    kappa: Optional[float]
    notes: tuple[str, ...] = ()

    @property
    def correct(self) -> int:
        return int(np.trace(self.matrix.counts))

    @property
    def incorrect(self) -> int:
        return self.matrix.total - self.correct

    def to_dict(self) -> dict:
        return {
            "classes": list(self.matrix.classes),
            "confusion": self.matrix.counts.tolist(),
            "confusion_layout": "rows=predicted, columns=actual",
            "correctly_classified": self.correct,
            "incorrectly_classified": self.incorrect,
            "accuracy": self.accuracy,
            "kappa": self.kappa,
            "weighted": {
                "precision": self.weighted_precision,
                "recall": self.weighted_recall,
                "f_measure": self.weighted_f1,
            },
            "per_class": {
                c: {"precision": m.precision, "recall": m.recall, "f_measure": m.f1, "support": m.support}
                for c, m in self.per_class.items()
            },
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        """Per-class rows plus a weighted row, in the FR/NFR results table layout."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["class", "correctly_classified", "incorrectly_classified",
                    "precision", "recall", "f_measure", "kappa"])
        diag = np.diag(self.matrix.counts)
        actual = self.matrix.counts.sum(axis=0)
        for i, c in enumerate(self.matrix.classes):
            m = self.per_class[c]
            w.writerow([c, int(diag[i]), int(actual[i] - diag[i]),
                        _fmt(m.precision), _fmt(m.recall), _fmt(m.f1), ""])
        w.writerow(["weighted", self.correct, self.incorrect, _fmt(self.weighted_precision),
                    _fmt(self.weighted_recall), _fmt(self.weighted_f1), _fmt(self.kappa)])
        return buf.getvalue()


def metrics(matrix: ConfusionMatrix) -> EvalReport:
    """Per-class and support-weighted precision/recall/F1, accuracy and kappa.

    Classes with an undefined value are left out of that weighted average, with
    an :class:`UndefinedMetricWarning`.
    """
    n = matrix.total
    if n == 0:
        raise ValueError("cannot score an empty confusion matrix")
    c = matrix.counts
    diag = np.diag(c)
    predicted = c.sum(axis=1)
    actual = c.sum(axis=0)
    per_class: dict[str, ClassMetrics] = {}
    for i, name in enumerate(matrix.classes):
        p = float(diag[i] / predicted[i]) if predicted[i] else None
        r = float(diag[i] / actual[i]) if actual[i] else None
        per_class[name] = ClassMetrics(p, r, _f1(p, r), int(actual[i]))

    notes: list[str] = []

    def weighted(attr: str) -> Optional[float]:
        num = den = 0.0
        skipped = []
        for name, m in per_class.items():
            v = getattr(m, attr)
            if m.support == 0:
                continue
            if v is None:
                skipped.append(name)
                continue
            num += m.support * v
            den += m.support
        if skipped:
            msg = f"{attr} undefined for {', '.join(skipped)}; left out of the weighted average"
            notes.append(msg)
            warnings.warn(msg, UndefinedMetricWarning, stacklevel=3)
        return num / den if den else None

    wp, wr, wf = weighted("precision"), weighted("recall"), weighted("f1")
    return EvalReport(matrix, per_class, wp, wr, wf, float(diag.sum() / n), kappa(matrix), tuple(notes))


@dataclass(frozen=True)
class CVResult:
    pooled: EvalReport
    per_run: tuple[EvalReport, ...]
    predictions: tuple[tuple[str, ...], ...]  # per run, aligned with the input order


FitPredict = Callable[[Sequence[int], Sequence[int]], Sequence[Hashable]]


def cross_validate(
    labels: Sequence[Hashable],
    ids: Sequence[str],
    plan: FoldPlan,
    fit_predict: FitPredict,
    classes: Optional[Sequence[str]] = None,
    required: Optional[Sequence[str]] = None,
) -> CVResult:
    """Run ``fit_predict(train_idx, test_idx)`` on every fold of every run.

    Predictions are pooled over folds and runs into one matrix; per-run
    matrices are kept too. ``required`` lists classes every training part must
    contain (default: all classes).
    """
    truth = [str(v) for v in labels]
    names = tuple(classes) if classes is not None else tuple(sorted(set(truth)))
    needed = tuple(required) if required is not None else names
    runs: list[EvalReport] = []
    all_preds: list[tuple[str, ...]] = []
    pooled: Optional[ConfusionMatrix] = None
    if len(ids) != len(truth):
        raise ValueError("ids and labels differ in length")
    position = {rid: i for i, rid in enumerate(ids)}
    for run in range(plan.runs):
        preds: list[Optional[str]] = [None] * len(truth)
        for fold, (train_ids, test_ids) in enumerate(plan.splits(run, ids)):
            train = [position[r] for r in train_ids]
            test = [position[r] for r in test_ids]
            present = {truth[i] for i in train}
            for c in needed:
                if c not in present:
                    raise FoldError(run, fold, c)
            out = fit_predict(train, test)
            if len(out) != len(test):
                raise ValueError("fit_predict returned the wrong number of predictions")
            for i, p in zip(test, out):
                preds[i] = str(p)
        if any(p is None for p in preds):
            raise ValueError(f"run {run}: some instances were never tested")
        matrix = confusion(preds, truth, names)
        pooled = matrix if pooled is None else pooled + matrix
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UndefinedMetricWarning)
            runs.append(metrics(matrix))
        all_preds.append(tuple(preds))  # type: ignore[arg-type]
    assert pooled is not None
    return CVResult(metrics(pooled), tuple(runs), tuple(all_preds))


def hopkins(X: Sequence[Sequence[float]], sample_fraction: float = 0.1, seed: int = 0) -> float:
    """Hopkins statistic H = sum(w) / (sum(u) + sum(w)).

    w: nearest-neighbour distances from sampled data points to the other data
    points; u: nearest-data-point distances from as many uniform points drawn in
    the bounding box. H near 0 means clusterable, about 0.5 means random.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 10:
        raise ValueError("Hopkins statistic needs at least 10 vectors")
    if not 0 < sample_fraction <= 0.5:
        raise ValueError("sample_fraction must lie in (0, 0.5]")
    lo, hi = X.min(axis=0), X.max(axis=0)
    if np.all(hi == lo):
        raise ValueError("degenerate bounding box: all vectors are identical")
    m = max(1, int(round(sample_fraction * n)))
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=m, replace=False)
    synthetic = lo + rng.random((m, X.shape[1])) * (hi - lo)

    def nearest(points: np.ndarray, exclude: Optional[np.ndarray]) -> np.ndarray:
        out = np.empty(len(points))
        for r, p in enumerate(points):
            d = np.sqrt(((X - p) ** 2).sum(axis=1))
            if exclude is not None:
                d[exclude[r]] = np.inf
            out[r] = d.min()
        return out

    w = nearest(X[idx], idx)
    u = nearest(synthetic, None)
    total = u.sum() + w.sum()
    return float(w.sum() / total) if total > 0 else 0.5


def hopkins_mean(
    X: Sequence[Sequence[float]], seeds: int = 20, sample_fraction: float = 0.1, base_seed: int = 0
) -> float:
    return float(np.mean([hopkins(X, sample_fraction, base_seed + s) for s in range(seeds)]))


@dataclass(frozen=True)
class SilhouetteResult:
    values: np.ndarray = field(repr=False)
    mean: float


def silhouette(X: Sequence[Sequence[float]], assignments: Sequence[int]) -> SilhouetteResult:
    """Per-point silhouette s = (b - a) / max(a, b); singletons score 0."""
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(assignments)
    if len(labels) != X.shape[0]:
        raise ValueError("one assignment per vector is required")
    clusters = np.unique(labels)
    if len(clusters) < 2:
        raise ValueError("silhouette needs at least two clusters")
    D = pairwise_distances(X)
    masks = {c: labels == c for c in clusters}
    sizes = {c: int(m.sum()) for c, m in masks.items()}
    s = np.zeros(len(labels))
    for i, own in enumerate(labels):
        if sizes[own] == 1:
            continue
        a = D[i, masks[own]].sum() / (sizes[own] - 1)
        b = min(D[i, masks[c]].mean() for c in clusters if c != own)
        denom = max(a, b)
        s[i] = 0.0 if denom == 0 else (b - a) / denom
    return SilhouetteResult(s, float(s.mean()))
