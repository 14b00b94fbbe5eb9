import json

import pytest

from reqclass.config import ConfigError, ExperimentConfig, Params, config_from_dict, load_config
from reqclass.experiments import (
    cluster_diagnostics,
    comparison_csv,
    run_experiment,
)

FAST = {"iterations": 30, "K": 4, "clusters": 4}


def test_defaults():
    c = ExperimentConfig()
    assert (c.task, c.method, c.fold_k, c.fold_runs) == ("fr_nfr", "tree", 10, 1)
    assert c.params.min_leaf == 6 and c.params.K == 10 and c.params.alpha is None
    assert c.params.feature_scope == "global"
    sub = ExperimentConfig(task="nfr_sub", method="bnb")
    assert (sub.fold_k, sub.fold_runs) == (5, 5)


@pytest.mark.parametrize(
    "doc",
    [
        {"colour": 1},
        {"params": {"colour": 1}},
        {"stages": {"spelling": True}},
        {"task": "nfr_sub", "method": "tree"},
        {"method": "svm"},
        {"format": "xml"},
        {"params": {"linkage": "ward"}},
        {"params": {"min_leaf": 0}},
        {"params": {"feature_scope": "run"}},
        {"seed": "zero"},
    ],
)
def test_invalid_configs(doc):
    with pytest.raises(ConfigError):
        config_from_dict(doc)


def test_paths_resolve_against_config_dir(tmp_path):
    sub = tmp_path / "conf"
    sub.mkdir()
    path = sub / "exp.yaml"
    path.write_text("corpus: ../data/nfr.arff\ntask: nfr_sub\nmethod: kmeans\nparams:\n  exclude: []\n")
    c = load_config(path)
    assert c.corpus == str(tmp_path / "data" / "nfr.arff")
    assert c.params.exclude == ()


def test_bad_yaml(tmp_path):
    path = tmp_path / "x.yaml"
    path.write_text("a: [\n")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")


def test_yaml_round_trip(tmp_path):
    c = ExperimentConfig(task="nfr_sub", method="lda", params=Params(K=5))
    path = tmp_path / "c.yaml"
    path.write_text(c.to_yaml())
    assert load_config(path) == c


def test_override_skips_none():
    c = ExperimentConfig().override(seed=None, out="elsewhere")
    assert c.seed == 0 and c.out == "elsewhere"


# -- experiments -------------------------------------------------------------------


def _config(method, **params):
    task = "fr_nfr" if method == "tree" else "nfr_sub"
    return ExperimentConfig(task=task, method=method, params=Params(**params))


def test_fr_nfr_on_sample(sample_corpus):
    res = run_experiment(_config("tree"), sample_corpus)
    m = res.report.matrix
    assert m.classes == ("FR", "NFR") and m.total == len(sample_corpus)
    assert res.details["feature_scope"] == "global"
    assert len(res.details["features"]) <= 13
    doc = json.loads(res.to_json())
    assert doc["format"] == "reqclass.experiment" and doc["version"] == 1


def test_fr_nfr_fold_scope(sample_corpus):
    res = run_experiment(_config("tree", feature_scope="fold"), sample_corpus)
    assert res.details["feature_scope"] == "fold"
    assert res.report.matrix.total == len(sample_corpus)


@pytest.mark.parametrize("method", ["bnb", "lda", "btm", "hier", "kmeans", "hybrid"])
def test_nfr_sub_methods_on_sample(sample_corpus, method):
    res = run_experiment(_config(method, **FAST), sample_corpus)
    n_nfr = sum(1 for r in sample_corpus if r.label != "F" and r.label != "PO")
    runs = 5 if method == "bnb" else 1
    assert res.report.matrix.total == n_nfr * runs
    assert "PO" not in res.report.matrix.classes
    again = run_experiment(_config(method, **FAST), sample_corpus)
    assert again.to_json() == res.to_json()


def test_comparison_csv(sample_corpus):
    a = run_experiment(_config("kmeans", **FAST), sample_corpus)
    b = run_experiment(_config("bnb", **FAST), sample_corpus)
    text = comparison_csv([a, b])
    lines = text.splitlines()
    assert lines[0].startswith("method,preprocessing,")
    assert lines[0].endswith("total_R,total_P")
    assert [ln.split(",")[0] for ln in lines[1:]] == ["bnb", "kmeans"]


def test_comparison_identical_reports_identical_rows(sample_corpus):
    a = run_experiment(_config("hier", **FAST), sample_corpus)
    rows = comparison_csv([a, json.loads(a.to_json())]).splitlines()[1:]
    assert rows[0] == rows[1]


def test_comparison_errors(sample_corpus):
    with pytest.raises(ValueError):
        comparison_csv([])
    sub = run_experiment(_config("kmeans", **FAST), sample_corpus)
    fr = run_experiment(_config("tree"), sample_corpus)
    with pytest.raises(ValueError):
        comparison_csv([sub, fr])


def test_cluster_diagnostics(sample_corpus):
    d = cluster_diagnostics(sample_corpus, _config("kmeans", **FAST))
    assert 0.0 <= d["hopkins"] <= 1.0
    assert all(-1.0 <= d[k] <= 1.0 for k in ("silhouette_hier", "silhouette_kmeans", "silhouette_hybrid"))
