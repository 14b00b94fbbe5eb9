"""``reqclass`` command line: ingest, preprocess, evaluate, compare, report.

Exit status is 0 on success, 1 for usage or configuration problems and 2 when
the input data itself is unusable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import METHODS, TASKS, ConfigError, ExperimentConfig, Stages, load_config
from .corpus import CorpusFormatError, corpus_to_csv, label_counts, load_corpus
from .evaluation import FoldError, UndefinedMetricWarning
from .experiments import cluster_diagnostics, comparison_csv, prepare, run_experiment
from .io import atomic_write_text
from .preprocess import RuleFileError

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for data errors here
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--config", help="experiment config (YAML)")
    g.add_argument("--seed", type=int, help="random seed (overrides the config)")
    g.add_argument("--out", help="output directory (overrides the config)")
    g.add_argument("--format", choices=("json", "csv"), help="format of the summary printed to stdout")
    g.add_argument("--corpus", help="corpus file (overrides the config)")
    g.add_argument("--corpus-format", choices=("arff", "csv"), help="corpus format; guessed from the suffix")
    return p


def _stage_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-entities", action="store_true", help="skip entity blinding")
    p.add_argument("--no-temporal", action="store_true", help="skip temporal normalization and rules")
    p.add_argument("--no-nfr-rules", action="store_true", help="skip the NFR rewrite rules")
    p.add_argument("--raw", action="store_true", help="disable every preprocessing stage")
    p.add_argument("--dictionary", help="entity dictionary (TSV)")
    p.add_argument("--rules", help="rewrite rule file (YAML)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="reqclass", description="Requirement classification experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("ingest", parents=[common], help="parse a corpus and write it as CSV with label counts")
    p.add_argument("input", nargs="?", help="corpus file (default: the configured corpus)")

    p = sub.add_parser("preprocess", parents=[common], help="write the processed corpus and the rule audit log")
    _stage_flags(p)

    p = sub.add_parser("evaluate", parents=[common], help="run one task/method and write its reports")
    _stage_flags(p)
    p.add_argument("--task", choices=TASKS)
    p.add_argument("--method", choices=METHODS)

    p = sub.add_parser("compare", parents=[common], help="merge NFR sub-classification results into one grid")
    p.add_argument("results", nargs="+", help="result JSON files written by evaluate")

    p = sub.add_parser("report", parents=[common], help="print defaults, a saved result, or cluster diagnostics")
    p.add_argument("result", nargs="?", help="result JSON written by evaluate")
    p.add_argument("--show-defaults", action="store_true", help="print the full default config")
    p.add_argument("--diagnostics", action="store_true", help="Hopkins statistic and silhouettes of the NFR vectors")
    _stage_flags(p)
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    changes = {
        "seed": args.seed,
        "out": args.out,
        "format": args.format,
        "corpus": getattr(args, "corpus", None),
        "corpus_format": getattr(args, "corpus_format", None),
        "dictionary": getattr(args, "dictionary", None),
        "rules": getattr(args, "rules", None),
        "task": getattr(args, "task", None),
        "method": getattr(args, "method", None),
    }
    # switching task alone picks a method that fits it
    if changes["task"] == "fr_nfr" and not changes["method"]:
        changes["method"] = "tree"
    elif changes["task"] == "nfr_sub" and not changes["method"] and cfg.method == "tree":
        changes["method"] = "bnb"
    elif changes["method"] and not changes["task"]:
        changes["task"] = "fr_nfr" if changes["method"] == "tree" else "nfr_sub"
    if getattr(args, "raw", False):
        changes["stages"] = Stages(False, False, False)
    elif any(getattr(args, f, False) for f in ("no_entities", "no_temporal", "no_nfr_rules")):
        s = cfg.stages
        changes["stages"] = Stages(
            s.entities and not args.no_entities,
            s.temporal and not args.no_temporal,
            s.nfr_rules and not args.no_nfr_rules,
        )
    return cfg.override(**changes)


def _require_paths(cfg: ExperimentConfig, corpus: bool = True) -> None:
    if corpus and not cfg.corpus:
        raise ConfigError("no corpus given (set 'corpus' in the config or pass --corpus)")
    for name in ("corpus", "dictionary", "rules"):
        path = getattr(cfg, name)
        if path and not os.path.isfile(path):
            raise ConfigError(f"{name} file not found: {path}")


def _load(cfg: ExperimentConfig, path: Optional[str] = None):
    return load_corpus(path or cfg.corpus, cfg.corpus_format)


def _emit(text: str) -> None:
    sys.stdout.write(text)


def cmd_ingest(args: argparse.Namespace) -> int:
    cfg = _config(args)
    if args.input:
        cfg = cfg.override(corpus=args.input)
    _require_paths(cfg)
    corpus = _load(cfg)
    out = Path(cfg.out)
    counts = {lab.value: n for lab, n in sorted(label_counts(corpus).items(), key=lambda kv: kv[0].value)}
    summary = {"requirements": len(corpus), "labels": counts}
    atomic_write_text(out / "corpus.csv", corpus_to_csv(corpus))
    atomic_write_text(out / "labels.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "count"])
        w.writerows(counts.items())
        _emit(buf.getvalue())
    else:
        _emit(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_preprocess(args: argparse.Namespace) -> int:
    cfg = _config(args)
    _require_paths(cfg)
    corpus = _load(cfg)
    processed, tagged = prepare(corpus, cfg)
    out = Path(cfg.out)
    audit = io.StringIO()
    fired = 0
    for req, new, t in zip(corpus, processed, tagged):
        rec = {
            "id": req.id,
            "original": req.text,
            "processed": new.text,
            "fired": [{"rule": f.rule, "before": f.before, "after": f.after} for f in t.fired],
        }
        fired += len(t.fired)
        audit.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
    atomic_write_text(out / "processed.csv", corpus_to_csv(processed))
    atomic_write_text(out / "audit.jsonl", audit.getvalue())
    changed = sum(a.text != b.text for a, b in zip(corpus, processed))
    summary = {"requirements": len(processed), "changed": changed, "rule_firings": fired}
    if cfg.format == "csv":
        _emit("requirements,changed,rule_firings\n" f"{len(processed)},{changed},{fired}\n")
    else:
        _emit(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK


def result_stem(cfg: ExperimentConfig) -> str:
    return f"{cfg.task}_{cfg.method}_{'processed' if cfg.stages.any else 'raw'}"


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    _require_paths(cfg)
    result = run_experiment(cfg, _load(cfg))
    out = Path(cfg.out)
    stem = result_stem(cfg)
    atomic_write_text(out / f"{stem}.json", result.to_json())
    atomic_write_text(out / f"{stem}.csv", result.to_csv())
    atomic_write_text(out / f"{stem}_confusion.csv", result.report.matrix.to_csv())
    atomic_write_text(out / f"{stem}_confusion_normalized.csv", result.report.matrix.to_csv(normalized=True))
    rep = result.report
    if cfg.format == "csv":
        _emit(result.to_csv())
    else:
        summary = {
            "task": result.task,
            "method": result.method,
            "processed": result.processed,
            "accuracy": rep.accuracy,
            "kappa": rep.kappa,
            "weighted": {"precision": rep.weighted_precision, "recall": rep.weighted_recall, "f_measure": rep.weighted_f1},
            "files": [f"{stem}.json", f"{stem}.csv", f"{stem}_confusion.csv", f"{stem}_confusion_normalized.csv"],
        }
        _emit(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _read_result(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != "reqclass.experiment":
        raise DataError(f"{path} is not a result file written by 'reqclass evaluate'")
    return doc


def cmd_compare(args: argparse.Namespace) -> int:
    if len(args.results) < 2:
        raise UsageError("compare needs at least two result files")
    cfg = _config(args)
    docs = [_read_result(p) for p in args.results]
    if any(d["task"] != "nfr_sub" for d in docs):
        raise DataError("compare only accepts NFR sub-classification results")
    try:
        grid = comparison_csv(docs)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    atomic_write_text(Path(cfg.out) / "comparison.csv", grid)
    _emit(grid)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    if args.show_defaults:
        _emit(ExperimentConfig().to_yaml())
        return EXIT_OK
    cfg = _config(args)
    if args.diagnostics:
        _require_paths(cfg)
        diag = cluster_diagnostics(_load(cfg), cfg)
        if cfg.format == "csv":
            _emit("statistic,value\n" + "".join(f"{k},{v!r}\n" for k, v in diag.items()))
        else:
            _emit(json.dumps(diag, indent=2, sort_keys=True) + "\n")
        atomic_write_text(Path(cfg.out) / "diagnostics.json", json.dumps(diag, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    if not args.result:
        raise UsageError("report needs a result file, --show-defaults or --diagnostics")
    doc = _read_result(args.result)
    if cfg.format == "csv":
        if doc["task"] == "nfr_sub":
            _emit(comparison_csv([doc]))
        else:
            rep = doc["report"]
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["accuracy", "kappa", "precision", "recall", "f_measure"])
            wt = rep["weighted"]
            w.writerow([rep["accuracy"], rep["kappa"], wt["precision"], wt["recall"], wt["f_measure"]])
            _emit(buf.getvalue())
    else:
        _emit(json.dumps(doc["report"], indent=2, sort_keys=True) + "\n")
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "preprocess": cmd_preprocess,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "report": cmd_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            # undefined metrics are already listed in each report's notes
            warnings.simplefilter("ignore", UndefinedMetricWarning)
            return _COMMANDS[args.command](args)
    except (ConfigError, UsageError) as exc:
        print(f"reqclass: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, CorpusFormatError, RuleFileError, FoldError, ValueError) as exc:
        print(f"reqclass: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"reqclass: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
