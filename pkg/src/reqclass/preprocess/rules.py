"""Co-occurrence guarded rewrite rules over tagged token sequences.

A rule's ``pattern`` is a Python regular expression matched against the
requirement rendered as ``surface/TAG`` tokens separated by single spaces::

    Only/RB USER/NNP shall/MD access/VB the/DT PRODUCT/NNP ./.

Matches are always aligned to whole tokens. Two shorthands keep patterns
readable; both expand to exactly one token:

``<TAGS>``          a token whose tag matches ``TAGS`` (``<VB.*>``, ``<DT|PRP\\$>``)
``<:WORDS>``        a token whose surface matches ``WORDS`` (``<:only>``)
``<TAGS:WORDS>``    both

Matching is case-insensitive. The replacement is an ``re`` template
(``\\g<name>`` references) producing space-separated tokens, each either
``word/TAG`` or a bare word that is tagged with the lexicon.

``guard`` is an optional keyword list K. The rule then only fires when the
co-occurrence set of the matched term (the ``term`` group, or the whole match)
intersects the union of CO(k) over K.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

import yaml

from ..corpus import Label
from .cooccurrence import CooccurrenceIndex
from .tagger import PENN_TAGS, default_tagger
from .tokens import Firing, TaggedRequirement, Token, detokenize

__all__ = [
    "RewriteRule",
    "RuleFileError",
    "parse_rules",
    "load_rules",
    "default_rules",
    "apply_nfr_rules",
    "render",
]

_MACRO_RE = re.compile(r"(?<!\(\?P)(?<!\\g)<([^<>:=!]*)(?::([^<>]*))?>")
_GROUP_REF_RE = re.compile(r"\\g<([^>]+)>|\\(\d+)")


class RuleFileError(ValueError):
    def __init__(self, rule_id: str | None, message: str):
        self.rule_id = rule_id
        super().__init__(f"rule {rule_id!r}: {message}" if rule_id else message)


_DOT_RE = re.compile(r"(?<!\\)\.")


def _expand_macros(pattern: str) -> str:
    def repl(m: re.Match[str]) -> str:
        tags, words = m.group(1), m.group(2)
        # "." must not run across the token separator
        tag_re = _DOT_RE.sub("[^ ]", tags.strip()) or r"[^ /]+"
        word_re = _DOT_RE.sub("[^ ]", words.strip()) if words else r"[^ ]+"
        return rf"(?:(?:{word_re})/(?:{tag_re})(?= |$))"

    return _MACRO_RE.sub(repl, pattern)


@dataclass(frozen=True)
class RewriteRule:
    id: str
    pattern: str
    replacement: str
    guard: Optional[tuple[str, ...]] = None
    target_nfr: Optional[Label] = None
    description: str = ""

    def __post_init__(self) -> None:
        try:
            compiled = re.compile(rf"(?:(?<= )|^)(?:{_expand_macros(self.pattern)})(?= |$)", re.IGNORECASE)
        except re.error as exc:
            raise RuleFileError(self.id, f"pattern does not compile: {exc}") from None
        for named, numbered in _GROUP_REF_RE.findall(self.replacement):
            if named and not named.isdigit() and named not in compiled.groupindex:
                raise RuleFileError(self.id, f"replacement references unknown group {named!r}")
            num = int(numbered or (named if named.isdigit() else 0) or 0)
            if num > compiled.groups:
                raise RuleFileError(self.id, f"replacement references group {num} of {compiled.groups}")
        object.__setattr__(self, "compiled", compiled)


def render(tokens: Sequence[Token]) -> str:
    return " ".join(f"{t.surface}/{t.pos}" for t in tokens)


def _parse_replacement(text: str) -> list[Token]:
    tagger = default_tagger()
    out = []
    for piece in text.split():
        surface, sep, tag = piece.rpartition("/")
        if sep and surface and tag in PENN_TAGS:
            entity = surface if surface in ("USER", "PRODUCT") else None
            out.append(Token(surface, tag, entity))
        else:
            out.append(Token(piece, tagger.lexical(piece, 1)))
    return out


def _guard_passes(
    rule: RewriteRule,
    match: re.Match[str],
    index: Optional[CooccurrenceIndex],
    stopwords: frozenset[str],
) -> bool:
    if rule.guard is None:
        return True
    if index is None:
        return False
    span = match.group("term") if "term" in rule.compiled.groupindex and match.group("term") else match.group(0)
    terms = [
        piece.rpartition("/")[0].lower()
        for piece in span.split()
        if any(ch.isalnum() for ch in piece.rpartition("/")[0])
    ]
    terms = [t for t in terms if t not in stopwords]
    return bool(index.co_union(terms) & index.co_union(rule.guard))


def apply_nfr_rules(
    tagged: TaggedRequirement,
    rules: Sequence[RewriteRule],
    index: Optional[CooccurrenceIndex] = None,
    stopwords: frozenset[str] = frozenset(),
) -> TaggedRequirement:
    """Apply ``rules`` in order, one left-to-right pass each."""
    tokens = list(tagged.tokens)
    firings: list[Firing] = []
    for rule in rules:
        rendered = render(tokens)
        # char offset of each token start, to map matches back onto tokens
        starts = {}
        pos = 0
        for i, tok in enumerate(tokens):
            starts[pos] = i
            pos += len(tok.surface) + 1 + len(tok.pos) + 1
        new_tokens: list[Token] = []
        cursor = 0
        for m in rule.compiled.finditer(rendered):
            if m.end() == m.start():
                continue
            first = starts[m.start()]
            end_char = m.end() + 1
            last = starts.get(end_char, len(tokens))
            if not _guard_passes(rule, m, index, stopwords):
                continue
            replacement = _parse_replacement(m.expand(rule.replacement))
            old = tokens[first:last]
            if [(t.surface, t.pos) for t in old] == [(t.surface, t.pos) for t in replacement]:
                continue
            new_tokens.extend(tokens[cursor:first])
            new_tokens.extend(replacement)
            cursor = last
            firings.append(
                Firing(
                    rule.id,
                    detokenize([t.surface for t in old]),
                    detokenize([t.surface for t in replacement]),
                )
            )
        new_tokens.extend(tokens[cursor:])
        tokens = new_tokens
    return tagged.rewrite(tokens, firings, tagged.temporals if not firings else ())


def parse_rules(text: str) -> list[RewriteRule]:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise RuleFileError(None, f"invalid YAML: {exc}") from None
    if doc is None:
        return []
    if not isinstance(doc, dict) or "rules" not in doc:
        raise RuleFileError(None, "rule file must be a mapping with a 'rules' list")
    if doc.get("version", 1) != 1:
        raise RuleFileError(None, f"unsupported rule file version {doc.get('version')!r}")
    rules: list[RewriteRule] = []
    seen: set[str] = set()
    for i, entry in enumerate(doc["rules"] or []):
        if not isinstance(entry, dict):
            raise RuleFileError(f"#{i}", "rule entry must be a mapping")
        rid = str(entry.get("id") or f"#{i}")
        if rid in seen:
            raise RuleFileError(rid, "duplicate rule id")
        seen.add(rid)
        unknown = set(entry) - {"id", "pattern", "replacement", "guard", "target_nfr", "description"}
        if unknown:
            raise RuleFileError(rid, f"unknown fields {sorted(unknown)}")
        for required in ("pattern", "replacement"):
            if not isinstance(entry.get(required), str):
                raise RuleFileError(rid, f"missing or non-string {required!r}")
        guard = entry.get("guard")
        if guard is not None:
            if isinstance(guard, str):
                guard = guard.split()
            if not isinstance(guard, list) or not all(isinstance(g, str) for g in guard):
                raise RuleFileError(rid, "guard must be a list of keywords")
            guard = tuple(g.lower() for g in guard)
        target = entry.get("target_nfr")
        if target is not None:
            try:
                target = Label.from_token(str(target))
            except ValueError:
                raise RuleFileError(rid, f"unknown target_nfr {target!r}") from None
        rules.append(
            RewriteRule(
                id=rid,
                pattern=entry["pattern"],
                replacement=entry["replacement"],
                guard=guard,
                target_nfr=target,
                description=str(entry.get("description", "")),
            )
        )
    return rules


def load_rules(path: str | os.PathLike) -> list[RewriteRule]:
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read())


def default_rules() -> list[RewriteRule]:
    """The bundled Security rule set."""
    return parse_rules(resources.files(__package__).joinpath("data/security_rules.yaml").read_text("utf-8"))
