"""Labeled requirements corpus: ingestion, label bookkeeping and stratified folds.

Two input formats are understood:

* the ARFF-like file distributed with the PROMISE NFR data set
  (``ProjectID,'text',CLASS`` records after an ``@data`` marker), and
* a plain CSV with header ``project_id,text,label``, which is also the
  format written back out by :func:`write_csv`.

Requirement ids are not stored in either format; they are derived from the
project id and the record's ordinal within that project (``R2.18`` is the
18th requirement of project 2), so parsing the same records always yields
the same ids.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Callable, Iterable, Iterator, Sequence, Union

import numpy as np

__all__ = [
    "Label",
    "NFR_LABELS",
    "Requirement",
    "Corpus",
    "FoldPlan",
    "CorpusFormatError",
    "UnknownLabelError",
    "parse_corpus",
    "load_corpus",
    "write_csv",
    "label_counts",
    "stratified_folds",
]


class Label(str, enum.Enum):
    """The twelve dataset labels. ``FR`` is functional, everything else NFR."""

    FR = "F"
    A = "A"
    FT = "FT"
    L = "L"
    LF = "LF"
    MN = "MN"
    O = "O"  # noqa: E741
    PE = "PE"
    PO = "PO"
    SC = "SC"
    SE = "SE"
    US = "US"

    @property
    def is_functional(self) -> bool:
        return self is Label.FR

    @property
    def binary(self) -> str:
        """Coarse class used by the FR/NFR task."""
        return "FR" if self is Label.FR else "NFR"

    @classmethod
    def from_token(cls, token: str) -> "Label":
        tok = token.strip().strip("'\"").upper()
        if tok == "FR":
            return cls.FR
        try:
            return cls(tok)
        except ValueError:
            raise UnknownLabelError(token) from None

    def __str__(self) -> str:
        return self.value


NFR_LABELS: tuple[Label, ...] = tuple(lab for lab in Label if lab is not Label.FR)


class CorpusFormatError(ValueError):
    """A record could not be parsed. Carries the 1-based line number and field."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class UnknownLabelError(CorpusFormatError):
    def __init__(self, token: str, line: int | None = None):
        self.token = token
        super().__init__(f"unknown label token {token!r}", line=line, field="label")


@dataclass(frozen=True)
class Requirement:
    id: str
    project_id: str
    text: str
    label: Label

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError(f"requirement {self.id} has empty text")


@dataclass(frozen=True)
class Corpus:
    requirements: tuple[Requirement, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "requirements", tuple(self.requirements))
        seen: set[str] = set()
        for req in self.requirements:
            if req.id in seen:
                raise ValueError(f"duplicate requirement id {req.id!r}")
            seen.add(req.id)

    def __len__(self) -> int:
        return len(self.requirements)

    def __iter__(self) -> Iterator[Requirement]:
        return iter(self.requirements)

    def __getitem__(self, idx: int) -> Requirement:
        return self.requirements[idx]

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.requirements]

    @property
    def texts(self) -> list[str]:
        return [r.text for r in self.requirements]

    @property
    def labels(self) -> list[Label]:
        return [r.label for r in self.requirements]

    def filter(self, predicate: Callable[[Requirement], bool]) -> "Corpus":
        return Corpus(tuple(r for r in self.requirements if predicate(r)))

    def nfr(self, exclude: Iterable[Label] = ()) -> "Corpus":
        """NFR-only sub-corpus, optionally dropping some subcategories (e.g. PO)."""
        excluded = set(exclude)
        return self.filter(lambda r: not r.label.is_functional and r.label not in excluded)

    def with_texts(self, texts: Sequence[str]) -> "Corpus":
        if len(texts) != len(self.requirements):
            raise ValueError("text count does not match corpus size")
        return Corpus(
            tuple(
                Requirement(r.id, r.project_id, t, r.label)
                for r, t in zip(self.requirements, texts)
            )
        )


Source = Union[bytes, str, BinaryIO]


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        data = source
    elif isinstance(source, str):
        return source
    else:
        data = source.read()
        if isinstance(data, str):
            return data
    return data.decode("utf-8-sig")


def _assign_ids(records: list[tuple[str, str, Label]]) -> Corpus:
    ordinal: Counter[str] = Counter()
    reqs = []
    for project, text, label in records:
        ordinal[project] += 1
        reqs.append(Requirement(f"R{project}.{ordinal[project]}", project, text, label))
    return Corpus(tuple(reqs))


_ESCAPES = {"n": "\n", "t": "\t", "r": "\r"}


def _unquote_arff(value: str, line: int) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
        quote = value[0]
        body = value[1:-1]
        out = []
        i = 0
        while i < len(body):
            ch = body[i]
            if ch == "\\" and i + 1 < len(body):
                nxt = body[i + 1]
                out.append(_ESCAPES.get(nxt, nxt))
                i += 2
                continue
            if ch == quote and i + 1 < len(body) and body[i + 1] == quote:
                out.append(quote)
                i += 2
                continue
            out.append(ch)
            i += 1
        return "".join(out)
    if value[:1] in "'\"":
        raise CorpusFormatError("unterminated quoted text", line=line, field="text")
    return value


def _parse_arff(text: str) -> Corpus:
    records: list[tuple[str, str, Label]] = []
    lines = text.splitlines()
    has_data_marker = any(ln.strip().lower().startswith("@data") for ln in lines)
    in_data = not has_data_marker
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("@"):
            if line.lower().startswith("@data"):
                in_data = True
            continue
        if not in_data:
            continue
        head, sep, rest = line.partition(",")
        if not sep:
            raise CorpusFormatError("expected 'project,text,label'", line=lineno, field="project_id")
        body, sep, label_tok = rest.rpartition(",")
        if not sep:
            raise CorpusFormatError("missing label field", line=lineno, field="label")
        project = head.strip().strip("'\"")
        if not project:
            raise CorpusFormatError("empty project id", line=lineno, field="project_id")
        req_text = _unquote_arff(body, lineno)
        if not req_text.strip():
            raise CorpusFormatError("empty requirement text", line=lineno, field="text")
        try:
            label = Label.from_token(label_tok)
        except UnknownLabelError:
            raise UnknownLabelError(label_tok.strip(), line=lineno) from None
        records.append((project, req_text, label))
    return _assign_ids(records)


CSV_HEADER = ("project_id", "text", "label")


def _parse_csv(text: str) -> Corpus:
    if not text.strip():
        return Corpus()
    reader = csv.reader(io.StringIO(text, newline=""))
    records: list[tuple[str, str, Label]] = []
    header = next(reader, None)
    if header is None:
        return Corpus()
    if tuple(h.strip().lower() for h in header) != CSV_HEADER:
        raise CorpusFormatError(
            f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}", line=1
        )
    for row in reader:
        lineno = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise CorpusFormatError(f"expected 3 fields, got {len(row)}", line=lineno)
        project, req_text, label_tok = row
        if not project.strip():
            raise CorpusFormatError("empty project id", line=lineno, field="project_id")
        if not req_text.strip():
            raise CorpusFormatError("empty requirement text", line=lineno, field="text")
        try:
            label = Label.from_token(label_tok)
        except UnknownLabelError:
            raise UnknownLabelError(label_tok, line=lineno) from None
        records.append((project.strip(), req_text, label))
    return _assign_ids(records)


def parse_corpus(source: Source, format: str = "arff") -> Corpus:
    """Parse a corpus from bytes, text or a binary stream.

    ``format`` is ``"arff"`` (PROMISE style) or ``"csv"``.
    """
    text = _read_text(source)
    fmt = format.lower()
    if fmt in ("arff", "promise", "promisearff"):
        return _parse_arff(text)
    if fmt == "csv":
        return _parse_csv(text)
    raise ValueError(f"unknown corpus format {format!r}")


def guess_format(path: str | os.PathLike) -> str:
    return "csv" if Path(path).suffix.lower() == ".csv" else "arff"


def load_corpus(path: str | os.PathLike, format: str | None = None) -> Corpus:
    with open(path, "rb") as fh:
        return parse_corpus(fh, format or guess_format(path))


def corpus_to_csv(corpus: Corpus) -> str:
    lines = [",".join(CSV_HEADER)]
    for req in corpus:
        quoted = '"' + req.text.replace('"', '""') + '"'
        lines.append(f"{req.project_id},{quoted},{req.label.value}")
    return "\n".join(lines) + "\n"


def write_csv(corpus: Corpus, path: str | os.PathLike) -> None:
    from .io import atomic_write_text

    atomic_write_text(path, corpus_to_csv(corpus))


def label_counts(corpus: Corpus) -> dict[Label, int]:
    return dict(Counter(r.label for r in corpus))


@dataclass(frozen=True)
class FoldPlan:
    """Fold assignment for ``runs`` repetitions of stratified ``k``-fold CV.

    ``assignment[r][req_id]`` is the fold index of a requirement in run ``r``.
    """

    k: int
    runs: int
    seed: int
    assignment: tuple[dict[str, int], ...] = field(repr=False)

    def splits(self, run: int, ids: Sequence[str] | None = None) -> list[tuple[list[str], list[str]]]:
        """(train_ids, test_ids) for every fold of one run, in fold order."""
        mapping = self.assignment[run]
        order = list(ids) if ids is not None else list(mapping)
        out = []
        for f in range(self.k):
            test = [i for i in order if mapping[i] == f]
            train = [i for i in order if mapping[i] != f]
            out.append((train, test))
        return out

    def to_json(self) -> str:
        return json.dumps(
            {"k": self.k, "runs": self.runs, "seed": self.seed, "assignment": list(self.assignment)},
            sort_keys=True,
        )


def stratified_folds(
    corpus: Corpus,
    k: int,
    runs: int = 1,
    seed: int = 0,
    key: Callable[[Requirement], object] = lambda r: r.label,
) -> FoldPlan:
    """Deterministic stratified fold plan.

    Members of each stratum are shuffled and dealt round-robin into folds. The
    dealing position carries over from one stratum to the next, which keeps the
    overall fold sizes within one of each other as well.
    """
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > len(corpus):
        raise ValueError(f"k={k} exceeds corpus size {len(corpus)}")
    if runs < 1:
        raise ValueError("runs must be positive")
    strata: dict[str, list[str]] = {}
    for req in corpus:
        strata.setdefault(str(key(req)), []).append(req.id)
    rng = np.random.default_rng(seed)
    assignments = []
    for _ in range(runs):
        mapping: dict[str, int] = {}
        pos = 0
        for name in sorted(strata):
            members = strata[name]
            for idx in rng.permutation(len(members)):
                mapping[members[idx]] = pos % k
                pos += 1
        assignments.append({rid: mapping[rid] for rid in corpus.ids})
    return FoldPlan(k=k, runs=runs, seed=seed, assignment=tuple(assignments))
