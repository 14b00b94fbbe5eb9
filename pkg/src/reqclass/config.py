"""Experiment configuration: one YAML file per experiment."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Optional

import yaml

__all__ = ["ConfigError", "Stages", "Folds", "Params", "ExperimentConfig", "load_config", "TASKS", "METHODS"]

TASKS = ("fr_nfr", "nfr_sub")
METHODS = ("tree", "bnb", "lda", "btm", "hier", "kmeans", "hybrid")
_TASK_METHODS = {"fr_nfr": ("tree",), "nfr_sub": ("bnb", "lda", "btm", "hier", "kmeans", "hybrid")}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Stages:
    entities: bool = True
    temporal: bool = True
    nfr_rules: bool = True

    @property
    def any(self) -> bool:
        return self.entities or self.temporal or self.nfr_rules


@dataclass(frozen=True)
class Folds:
    k: Optional[int] = None  # default: 10 for fr_nfr, 5 for nfr_sub
    runs: Optional[int] = None  # default: 1 for fr_nfr, 5 for nfr_sub


@dataclass(frozen=True)
class Params:
    # decision tree + features
    min_leaf: int = 6
    cutoff_syntactic: float = 0.8
    cutoff_keywords: float = 0.7
    signed_keywords: bool = True
    feature_scope: str = "global"  # or "fold": refit the feature spec on each training part
    # naive bayes
    smoothing: float = 1.0
    likelihood: str = "presence"
    # topic models
    K: int = 10
    alpha: Optional[float] = None  # default 50/K
    beta: float = 0.01
    iterations: int = 1000
    window: Optional[int] = None
    # clustering
    clusters: int = 10
    linkage: str = "average"
    max_iters: int = 300
    weighting: str = "counts"  # or "tfidf"
    # sub-classification scope and diagnostics
    exclude: tuple[str, ...] = ("PO",)
    hopkins_seeds: int = 20
    sample_fraction: float = 0.1


@dataclass(frozen=True)
class ExperimentConfig:
    corpus: Optional[str] = None
    corpus_format: Optional[str] = None
    dictionary: Optional[str] = None
    rules: Optional[str] = None
    stages: Stages = field(default_factory=Stages)
    task: str = "fr_nfr"
    method: str = "tree"
    params: Params = field(default_factory=Params)
    folds: Folds = field(default_factory=Folds)
    seed: int = 0
    out: str = "out"
    format: str = "json"

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.method not in _TASK_METHODS[self.task]:
            raise ConfigError(f"method {self.method!r} does not apply to task {self.task!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.corpus_format not in (None, "arff", "csv"):
            raise ConfigError("corpus_format must be arff or csv")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        p = self.params
        if p.likelihood not in ("presence", "multinomial"):
            raise ConfigError("params.likelihood must be presence or multinomial")
        if p.linkage not in ("single", "complete", "average"):
            raise ConfigError("params.linkage must be single, complete or average")
        if p.feature_scope not in ("global", "fold"):
            raise ConfigError("params.feature_scope must be global or fold")
        if p.weighting not in ("counts", "tfidf"):
            raise ConfigError("params.weighting must be counts or tfidf")
        if p.min_leaf < 1 or p.K < 1 or p.clusters < 1 or p.iterations < 0:
            raise ConfigError("min_leaf, K and clusters must be positive; iterations non-negative")

    @property
    def fold_k(self) -> int:
        return self.folds.k if self.folds.k is not None else (10 if self.task == "fr_nfr" else 5)

    @property
    def fold_runs(self) -> int:
        return self.folds.runs if self.folds.runs is not None else (1 if self.task == "fr_nfr" else 5)

    def to_dict(self) -> dict[str, Any]:
        doc = asdict(self)
        doc["params"]["exclude"] = list(self.params.exclude)
        return doc

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def override(self, **changes: Any) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _build(cls, data: Any, where: str):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")
    if cls is Params and "exclude" in data:
        data = dict(data, exclude=tuple(data["exclude"] or ()))
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def config_from_dict(data: Optional[dict], base_dir: str = ".") -> ExperimentConfig:
    data = dict(data or {})
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    nested = {
        "stages": _build(Stages, data.pop("stages", None), "stages"),
        "params": _build(Params, data.pop("params", None), "params"),
        "folds": _build(Folds, data.pop("folds", None), "folds"),
    }
    for key in ("corpus", "dictionary", "rules"):
        if data.get(key) is not None:
            data[key] = os.path.normpath(os.path.join(base_dir, str(data[key])))
    try:
        return ExperimentConfig(**data, **nested)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    """Read a YAML config; relative paths inside it resolve against its directory."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
    if data is not None and not isinstance(data, dict):
        raise ConfigError("config must be a YAML mapping")
    return config_from_dict(data, os.path.dirname(os.path.abspath(path)))
