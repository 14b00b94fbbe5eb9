import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from reqclass.cli import main

SAMPLE = str(Path(__file__).parent / "data" / "sample.arff")


@pytest.fixture
def fast_config(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(f"corpus: {SAMPLE}\nparams:\n  iterations: 30\n  K: 4\n  clusters: 4\n")
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ingest(tmp_path, capsys):
    code, out, _ = run(["ingest", SAMPLE, "--out", str(tmp_path)], capsys)
    assert code == 0
    summary = json.loads(out)
    assert summary["requirements"] == 74
    assert json.loads((tmp_path / "labels.json").read_text()) == summary
    rows = list(csv.DictReader(io.StringIO((tmp_path / "corpus.csv").read_text())))
    assert len(rows) == 74


def test_ingest_csv_summary(tmp_path, capsys):
    code, out, _ = run(["ingest", SAMPLE, "--out", str(tmp_path), "--format", "csv"], capsys)
    assert code == 0 and out.startswith("label,count\n")


def test_preprocess_writes_audit(tmp_path, capsys):
    code, out, _ = run(["preprocess", "--corpus", SAMPLE, "--out", str(tmp_path)], capsys)
    assert code == 0
    records = [json.loads(ln) for ln in (tmp_path / "audit.jsonl").read_text().splitlines()]
    assert len(records) == 74
    assert sum(len(r["fired"]) for r in records) == json.loads(out)["rule_firings"] > 0
    assert {"rule", "before", "after"} == set(next(r for r in records if r["fired"])["fired"][0])


def test_preprocess_raw_is_identity(tmp_path, capsys):
    run(["ingest", SAMPLE, "--out", str(tmp_path / "a")], capsys)
    code, out, _ = run(["preprocess", "--corpus", SAMPLE, "--raw", "--out", str(tmp_path / "b")], capsys)
    assert code == 0 and json.loads(out)["changed"] == 0
    assert (tmp_path / "a" / "corpus.csv").read_text() == (tmp_path / "b" / "processed.csv").read_text()


def test_stage_flags_match_raw(tmp_path, capsys):
    flags = ["--no-entities", "--no-temporal", "--no-nfr-rules"]
    run(["preprocess", "--corpus", SAMPLE, *flags, "--out", str(tmp_path / "a")], capsys)
    run(["preprocess", "--corpus", SAMPLE, "--raw", "--out", str(tmp_path / "b")], capsys)
    assert (tmp_path / "a" / "processed.csv").read_bytes() == (tmp_path / "b" / "processed.csv").read_bytes()


def test_evaluate_files_and_rerun_identical(tmp_path, capsys, fast_config):
    argv = ["evaluate", "--config", fast_config, "--method", "kmeans", "--seed", "3"]
    code, out, _ = run([*argv, "--out", str(tmp_path / "a")], capsys)
    assert code == 0
    files = json.loads(out)["files"]
    assert files[0] == "nfr_sub_kmeans_processed.json"
    first = {name: (tmp_path / "a" / name).read_bytes() for name in files}
    run([*argv, "--out", str(tmp_path / "a")], capsys)
    assert {name: (tmp_path / "a" / name).read_bytes() for name in files} == first


def test_evaluate_tree_raw(tmp_path, capsys):
    code, out, _ = run(["evaluate", "--corpus", SAMPLE, "--raw", "--out", str(tmp_path), "--format", "csv"], capsys)
    assert code == 0
    assert out.startswith("class,correctly_classified")
    doc = json.loads((tmp_path / "fr_nfr_tree_raw.json").read_text())
    assert doc["processed"] is False and doc["report"]["classes"] == ["FR", "NFR"]
    matrix = (tmp_path / "fr_nfr_tree_raw_confusion.csv").read_text().splitlines()
    assert matrix[0] == "predicted\\actual,FR,NFR"


def test_compare_and_report(tmp_path, capsys, fast_config):
    for method in ("bnb", "hier"):
        assert run(["evaluate", "--config", fast_config, "--method", method, "--out", str(tmp_path)], capsys)[0] == 0
    results = [str(tmp_path / f"nfr_sub_{m}_processed.json") for m in ("hier", "bnb")]
    code, out, _ = run(["compare", *results, "--out", str(tmp_path)], capsys)
    assert code == 0
    assert (tmp_path / "comparison.csv").read_text() == out
    assert [ln.split(",")[0] for ln in out.splitlines()[1:]] == ["bnb", "hier"]
    code, out, _ = run(["report", results[0]], capsys)
    assert code == 0 and "confusion" in json.loads(out)


def test_compare_needs_two(tmp_path, capsys, fast_config):
    run(["evaluate", "--config", fast_config, "--method", "bnb", "--out", str(tmp_path)], capsys)
    code, _, err = run(["compare", str(tmp_path / "nfr_sub_bnb_processed.json")], capsys)
    assert code == 1 and "two" in err


def test_compare_rejects_fr_nfr(tmp_path, capsys, fast_config):
    run(["evaluate", "--config", fast_config, "--out", str(tmp_path)], capsys)
    run(["evaluate", "--config", fast_config, "--method", "bnb", "--out", str(tmp_path)], capsys)
    files = [str(tmp_path / n) for n in ("fr_nfr_tree_processed.json", "nfr_sub_bnb_processed.json")]
    assert run(["compare", *files], capsys)[0] == 2


def test_report_defaults_and_diagnostics(tmp_path, capsys, fast_config):
    code, out, _ = run(["report", "--show-defaults"], capsys)
    assert code == 0 and "min_leaf: 6" in out
    code, out, _ = run(["report", "--diagnostics", "--config", fast_config, "--out", str(tmp_path)], capsys)
    assert code == 0 and "hopkins" in json.loads(out)


def test_exit_codes(tmp_path, capsys):
    assert run(["evaluate"], capsys)[0] == 1  # no corpus
    assert run(["evaluate", "--corpus", str(tmp_path / "none.arff")], capsys)[0] == 1
    assert run(["evaluate", "--config", str(tmp_path / "none.yaml")], capsys)[0] == 1
    bad = tmp_path / "bad.arff"
    bad.write_text("@relation x\n@attribute a numeric\n@data\n1\n")
    assert run(["ingest", str(bad), "--out", str(tmp_path)], capsys)[0] == 2
    assert run(["report"], capsys)[0] == 1
    with pytest.raises(SystemExit) as info:
        main(["evaluate", "--method", "svm"])
    assert info.value.code == 1


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "reqclass.cli", "ingest", SAMPLE, "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["requirements"] == 74
