"""End-to-end experiments: FR/NFR decision tree and NFR sub-classification."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .classifiers import (
    Vocabulary,
    assign_cluster_labels,
    assign_topic_labels,
    cluster_hierarchical,
    cluster_hybrid,
    cluster_kmeans,
    predict_bnb,
    predict_tree,
    tfidf,
    train_bnb,
    train_btm,
    train_lda,
    train_tree,
)
from .config import ExperimentConfig
from .corpus import Corpus, Label, load_corpus, stratified_folds
from .evaluation import EvalReport, confusion, cross_validate, hopkins_mean, metrics, silhouette
from .features import KEYWORD_GROUP_TAGS, extract_matrix, fit_feature_spec
from .preprocess import (
    PreprocessConfig,
    TaggedRequirement,
    Token,
    load_dictionary,
    load_rules,
    pos_tag,
    preprocess_corpus,
    tokenize,
)
from .text import terms

__all__ = [
    "ExperimentResult",
    "SUBCATEGORY_ORDER",
    "SUB_METHODS",
    "preprocess_config",
    "prepare",
    "tag_raw",
    "run_fr_nfr",
    "run_nfr_sub",
    "run_experiment",
    "nfr_docs",
    "nfr_vectors",
    "cluster_diagnostics",
    "comparison_csv",
]

SUBCATEGORY_ORDER = ("A", "FT", "L", "LF", "MN", "O", "PE", "PO", "SC", "SE", "US")
SUB_METHODS = ("bnb", "lda", "btm", "hier", "kmeans", "hybrid")
_RESULT_FORMAT = "reqclass.experiment"
_RESULT_VERSION = 1


@dataclass(frozen=True)
class ExperimentResult:
    task: str
    method: str
    processed: bool
    report: EvalReport
    per_run: tuple[EvalReport, ...] = ()
    details: dict[str, Any] = field(default_factory=dict)
    config: Optional[dict[str, Any]] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": _RESULT_FORMAT,
            "version": _RESULT_VERSION,
            "task": self.task,
            "method": self.method,
            "processed": self.processed,
            "report": self.report.to_dict(),
            "per_run": [r.to_dict() for r in self.per_run],
            "details": self.details,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        if self.task == "fr_nfr":
            return self.report.to_csv()
        return comparison_csv([self.to_dict()])


def preprocess_config(config: ExperimentConfig) -> PreprocessConfig:
    stages = config.stages
    return PreprocessConfig(
        entities=stages.entities,
        temporal=stages.temporal,
        nfr_rules=stages.nfr_rules,
        dictionary=load_dictionary(config.dictionary) if config.dictionary else None,
        rules=load_rules(config.rules) if config.rules else None,
    )


def tag_raw(corpus: Corpus) -> list[TaggedRequirement]:
    """Tokenize and tag the original texts, no rewriting."""
    return [
        TaggedRequirement(r.id, pos_tag([Token(s) for s in tokenize(r.text)])) for r in corpus.requirements
    ]


def prepare(corpus: Corpus, config: ExperimentConfig) -> tuple[Corpus, list[TaggedRequirement]]:
    """Processed corpus and tagged requirements (raw tagging when every stage is off)."""
    if not config.stages.any:
        return corpus, tag_raw(corpus)
    return preprocess_corpus(corpus, preprocess_config(config))


def run_fr_nfr(corpus: Corpus, tagged: Sequence[TaggedRequirement], config: ExperimentConfig) -> ExperimentResult:
    """Stratified k-fold CV of the decision tree on the ten-feature vectors."""
    p = config.params
    labels = [lab.binary for lab in corpus.labels]

    def fit(idx: Sequence[int]):
        return fit_feature_spec(
            [tagged[i] for i in idx],
            [labels[i] for i in idx],
            cutoff_syntactic=p.cutoff_syntactic,
            cutoff_keywords=dict.fromkeys(KEYWORD_GROUP_TAGS, p.cutoff_keywords),
            signed_keywords=p.signed_keywords,
        )

    def matrix(spec) -> np.ndarray:
        return np.asarray(extract_matrix(tagged, spec), dtype=np.float64).reshape(len(tagged), -1)

    # the whole-corpus spec is reported either way; with fold scope CV refits it
    global_spec = fit(range(len(tagged)))
    X_global = matrix(global_spec) if p.feature_scope == "global" else None

    def fit_predict(train: Sequence[int], test: Sequence[int]) -> list[str]:
        X = X_global if X_global is not None else matrix(fit(train))
        tree = train_tree(X[list(train)], [labels[i] for i in train], min_leaf=p.min_leaf)
        return [predict_tree(tree, X[i].tolist())[0] for i in test]

    plan = stratified_folds(corpus, config.fold_k, config.fold_runs, config.seed, key=lambda r: r.label.binary)
    cv = cross_validate(labels, corpus.ids, plan, fit_predict, classes=("FR", "NFR"))
    details = {
        "features": global_spec.feature_names,
        "syntactic_probabilities": dict(sorted(global_spec.syntactic_probabilities.items())),
        "keyword_counts": {g.kind: len(g.keywords) for g in global_spec.keyword_groups},
        "folds": {"k": plan.k, "runs": plan.runs, "seed": plan.seed},
        "feature_scope": p.feature_scope,
    }
    return ExperimentResult("fr_nfr", "tree", config.stages.any, cv.pooled, cv.per_run, details)


def nfr_docs(corpus: Corpus, exclude: Sequence[str]) -> tuple[Corpus, list[list[str]], list[str]]:
    excluded = [Label.from_token(code) for code in exclude]
    sub = corpus.nfr(exclude=excluded)
    docs = [terms(t) for t in sub.texts]
    return sub, docs, [lab.value for lab in sub.labels]


def nfr_vectors(docs: Sequence[Sequence[str]], weighting: str = "counts") -> np.ndarray:
    X = Vocabulary.fit(docs).transform(docs)
    return tfidf(X) if weighting == "tfidf" else X


def _score(preds: Sequence[str], truth: Sequence[str], classes: Sequence[str]) -> EvalReport:
    return metrics(confusion(preds, truth, classes))


def run_nfr_sub(corpus: Corpus, config: ExperimentConfig) -> ExperimentResult:
    """NFR sub-classification with one of the six methods.

    BNB is cross-validated; topic models and clusterings are fitted on all NFRs
    and scored through a majority-vote label map.
    """
    p = config.params
    sub, docs, truth = nfr_docs(corpus, p.exclude)
    if not len(sub):
        raise ValueError("no NFRs left to sub-classify")
    classes = tuple(c for c in SUBCATEGORY_ORDER if c in set(truth))
    method = config.method
    details: dict[str, Any] = {"n_documents": len(sub), "classes": list(classes)}
    per_run: tuple[EvalReport, ...] = ()

    if method == "bnb":
        def fit_predict(train: Sequence[int], test: Sequence[int]) -> list[str]:
            model = train_bnb([docs[i] for i in train], [truth[i] for i in train], p.smoothing, p.likelihood)
            return [predict_bnb(model, docs[i])[0] for i in test]

        plan = stratified_folds(sub, config.fold_k, config.fold_runs, config.seed)
        cv = cross_validate(truth, sub.ids, plan, fit_predict, classes=classes)
        report, per_run = cv.pooled, cv.per_run
        details["folds"] = {"k": plan.k, "runs": plan.runs, "seed": plan.seed}
    elif method in ("lda", "btm"):
        if method == "lda":
            model = train_lda(docs, p.K, p.alpha, p.beta, p.iterations, config.seed)
        else:
            model = train_btm(docs, p.K, p.alpha, p.beta, p.iterations, config.seed, p.window)
        label_map = assign_topic_labels(model, truth)
        preds = label_map.predict(model.dominant_topics())
        report = _score(preds, truth, classes)
        details["topics"] = [
            {"topic": k, "label": label_map[k], "top_words": words}
            for k, words in enumerate(model.top_words(10))
        ]
    else:
        X = nfr_vectors(docs, p.weighting)
        if method == "hier":
            model = cluster_hierarchical(X, p.clusters, p.linkage)
        elif method == "kmeans":
            model = cluster_kmeans(X, p.clusters, config.seed, p.max_iters)
        else:
            model = cluster_hybrid(X, p.clusters, p.max_iters, p.linkage)
        label_map = assign_cluster_labels(model, truth)
        preds = label_map.predict(model.assignments)
        report = _score(preds, truth, classes)
        details["clusters"] = {str(c): label_map[c] for c in range(1, model.k + 1)}
        details["cluster_sizes"] = {str(c): len(model.members(c)) for c in range(1, model.k + 1)}
        if len(set(model.assignments)) > 1:
            details["silhouette"] = silhouette(X, model.assignments).mean
    return ExperimentResult("nfr_sub", method, config.stages.any, report, per_run, details)


def run_experiment(config: ExperimentConfig, corpus: Optional[Corpus] = None) -> ExperimentResult:
    if corpus is None:
        if not config.corpus:
            raise ValueError("no corpus configured")
        corpus = load_corpus(config.corpus, config.corpus_format)
    processed, tagged = prepare(corpus, config)
    if config.task == "fr_nfr":
        result = run_fr_nfr(processed, tagged, config)
    else:
        result = run_nfr_sub(processed, config)
    return ExperimentResult(
        result.task, result.method, result.processed, result.report, result.per_run, result.details,
        config.to_dict(),
    )


def cluster_diagnostics(corpus: Corpus, config: ExperimentConfig) -> dict[str, float]:
    """Hopkins statistic (seed-averaged) and mean silhouettes of the three clusterings."""
    p = config.params
    processed, _ = prepare(corpus, config)
    _, docs, _ = nfr_docs(processed, p.exclude)
    X = nfr_vectors(docs, p.weighting)
    out = {"hopkins": hopkins_mean(X, p.hopkins_seeds, p.sample_fraction, config.seed)}
    out["silhouette_hier"] = silhouette(X, cluster_hierarchical(X, p.clusters, p.linkage).assignments).mean
    out["silhouette_kmeans"] = silhouette(X, cluster_kmeans(X, p.clusters, config.seed, p.max_iters).assignments).mean
    out["silhouette_hybrid"] = silhouette(X, cluster_hybrid(X, p.clusters, p.max_iters, p.linkage).assignments).mean
    return out


def _pct(v: Optional[float]) -> str:
    return "" if v is None else f"{100.0 * v:.1f}"


def comparison_csv(results: Sequence[ExperimentResult | dict[str, Any]]) -> str:
    """Method-by-subcategory recall/precision grid, one row per result.

    Results may be :class:`ExperimentResult` objects or their ``to_dict`` form.
    The ``preprocessing`` column tells processed (P) from unprocessed (UP) runs;
    the total columns are the support-weighted recall and precision.
    """
    results = [r.to_dict() if isinstance(r, ExperimentResult) else r for r in results]
    if not results:
        raise ValueError("nothing to compare")
    class_sets = {tuple(r["report"]["classes"]) for r in results}
    if len(class_sets) != 1:
        raise ValueError("results cover different label sets: " + " vs ".join(",".join(c) for c in sorted(class_sets)))
    present = set(class_sets.pop())
    classes = [c for c in SUBCATEGORY_ORDER if c in present]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["method", "preprocessing"]
    for c in classes:
        header += [f"{c}_R", f"{c}_P"]
    w.writerow(header + ["total_R", "total_P"])
    order = {m: i for i, m in enumerate(SUB_METHODS)}
    rows = sorted(results, key=lambda r: (order.get(r["method"], len(order)), not r["processed"]))
    for r in rows:
        rep = r["report"]
        row = [r["method"], "P" if r["processed"] else "UP"]
        for c in classes:
            m = rep["per_class"][c]
            row += [_pct(m["recall"]), _pct(m["precision"])]
        row += [_pct(rep["weighted"]["recall"]), _pct(rep["weighted"]["precision"])]
        w.writerow(row)
    return buf.getvalue()
