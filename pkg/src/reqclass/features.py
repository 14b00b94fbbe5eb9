"""Syntactic-count and keyword-group features for FR/NFR classification."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .corpus import Label
from .preprocess.tokens import TaggedRequirement, Token

__all__ = [
    "SYNTACTIC_FEATURES",
    "KEYWORD_GROUP_TAGS",
    "SyntacticCounts",
    "SyntacticRanking",
    "KeywordGroup",
    "FeatureSpec",
    "FeatureSpecError",
    "count_syntactic",
    "rank_syntactic_features",
    "keyword_score",
    "keyword_discrimination",
    "fit_feature_spec",
    "extract_vector",
    "extract_matrix",
]

SYNTACTIC_FEATURES = ("adjectives", "adverbs", "adverbs_modifying_verbs", "cardinals", "degree_adj_adv")

KEYWORD_GROUP_TAGS: dict[str, frozenset[str]] = {
    "adjective": frozenset({"JJ", "JJR", "JJS"}),
    "adverb": frozenset({"RB", "RBR", "RBS"}),
    "modal": frozenset({"MD"}),
    "determiner": frozenset({"DT", "PDT", "WDT"}),
    "verb": frozenset({"VB", "VBD", "VBG", "VBN", "VBP", "VBZ"}),
    "preposition": frozenset({"IN", "TO"}),
    "singular_noun": frozenset({"NN", "NNP"}),
    "plural_noun": frozenset({"NNS", "NNPS"}),
}

DEFAULT_SYNTACTIC_CUTOFF = 0.8
DEFAULT_KEYWORD_CUTOFF = 0.7
_VERB_WINDOW = 2
_SPEC_FORMAT = "reqclass.feature-spec"
_SPEC_VERSION = 1

TagSource = Union[TaggedRequirement, Sequence[Token]]


class FeatureSpecError(ValueError):
    pass


def _tokens(item: TagSource) -> Sequence[Token]:
    return item.tokens if isinstance(item, TaggedRequirement) else item


def _is_nfr(label: Union[Label, str, bool]) -> bool:
    if isinstance(label, bool):
        return label
    if isinstance(label, Label):
        return not label.is_functional
    return label.upper() not in ("FR", "F")


@dataclass(frozen=True)
class SyntacticCounts:
    adjectives: int = 0
    adverbs: int = 0
    adverbs_modifying_verbs: int = 0
    cardinals: int = 0
    degree_adj_adv: int = 0

    def __post_init__(self) -> None:
        if min(self.as_tuple()) < 0:
            raise ValueError("syntactic counts must be non-negative")

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, f) for f in SYNTACTIC_FEATURES)

    def __getitem__(self, name: str) -> int:
        if name not in SYNTACTIC_FEATURES:
            raise KeyError(name)
        return getattr(self, name)


def count_syntactic(tagged: TagSource) -> SyntacticCounts:
    """Count adjective, adverb, cardinal and degree tags.

    An adverb "modifies a verb" when a VB* token lies within two positions of it.
    """
    tags = [t.pos for t in _tokens(tagged)]
    adj = adv = adv_verb = cd = degree = 0
    for i, tag in enumerate(tags):
        if tag.startswith("JJ"):
            adj += 1
        if tag.startswith("RB"):
            adv += 1
            window = tags[max(0, i - _VERB_WINDOW) : i] + tags[i + 1 : i + 1 + _VERB_WINDOW]
            if any(t.startswith("VB") for t in window):
                adv_verb += 1
        if tag == "CD":
            cd += 1
        if tag in ("JJR", "JJS", "RBR", "RBS"):
            degree += 1
    return SyntacticCounts(adj, adv, adv_verb, cd, degree)


@dataclass(frozen=True)
class SyntacticRanking:
    probabilities: Mapping[str, float]
    selected: tuple[str, ...]


def rank_syntactic_features(
    tagged: Iterable[TagSource], cutoff: float = DEFAULT_SYNTACTIC_CUTOFF
) -> SyntacticRanking:
    """Occurrence probability of each syntactic feature; keep those above ``cutoff``.

    A feature is kept when the fraction of requirements with a non-zero count is
    strictly greater than ``cutoff``; ``cutoff <= 0`` keeps all five.
    """
    counts = [count_syntactic(t) for t in tagged]
    if not counts:
        raise ValueError("cannot rank features on an empty corpus")
    probs = {
        name: sum(1 for c in counts if c[name] > 0) / len(counts) for name in SYNTACTIC_FEATURES
    }
    selected = tuple(n for n in SYNTACTIC_FEATURES if cutoff <= 0 or probs[n] > cutoff)
    return SyntacticRanking(probs, selected)


def keyword_score(nfr_count: int, total_count: int) -> float:
    """Laplace-smoothed P(NFR | w)."""
    return (nfr_count + 1) / (total_count + 2)


@dataclass(frozen=True)
class KeywordGroup:
    kind: str
    keywords: tuple[tuple[str, float], ...] = ()
    cutoff: float = DEFAULT_KEYWORD_CUTOFF

    def __post_init__(self) -> None:
        if self.kind not in KEYWORD_GROUP_TAGS:
            raise ValueError(f"unknown keyword group {self.kind!r}")
        object.__setattr__(self, "keywords", tuple(sorted((w, float(s)) for w, s in self.keywords)))
        for w, s in self.keywords:
            if not 0.0 <= s <= 1.0:
                raise ValueError(f"score of {w!r} outside [0, 1]")

    @property
    def nfr_words(self) -> frozenset[str]:
        return frozenset(w for w, s in self.keywords if s > 0.5)

    @property
    def fr_words(self) -> frozenset[str]:
        return frozenset(w for w, s in self.keywords if s < 0.5)

    @property
    def words(self) -> frozenset[str]:
        return frozenset(w for w, _ in self.keywords)


def keyword_discrimination(
    tagged: Sequence[TagSource],
    labels: Sequence[Union[Label, str, bool]],
    kind: str,
    cutoff: float = DEFAULT_KEYWORD_CUTOFF,
) -> KeywordGroup:
    """Select the words of one POS group whose smoothed P(NFR | w) is extreme.

    Occurrences are counted per token (lowercased) among tokens carrying one of
    the group's tags. A word is kept when its score is above ``cutoff`` or below
    ``1 - cutoff``.
    """
    if kind not in KEYWORD_GROUP_TAGS:
        raise ValueError(f"unknown keyword group {kind!r}")
    if len(tagged) != len(labels):
        raise ValueError("tagged requirements and labels differ in length")
    flags = [_is_nfr(lab) for lab in labels]
    if all(flags) or not any(flags):
        raise ValueError("keyword discrimination needs both FR and NFR requirements")
    tags = KEYWORD_GROUP_TAGS[kind]
    total: Counter[str] = Counter()
    nfr: Counter[str] = Counter()
    for item, is_nfr in zip(tagged, flags):
        for tok in _tokens(item):
            if tok.pos in tags:
                w = tok.surface.lower()
                total[w] += 1
                if is_nfr:
                    nfr[w] += 1
    chosen = []
    for w in sorted(total):
        score = keyword_score(nfr[w], total[w])
        if score > cutoff or score < 1 - cutoff:
            chosen.append((w, score))
    return KeywordGroup(kind, tuple(chosen), cutoff)


@dataclass(frozen=True)
class FeatureSpec:
    """Which features a vector holds, fitted once and reusable across runs.

    With ``signed_keywords`` a group entry counts NFR-indicative keywords minus
    FR-indicative ones; otherwise it is the plain count of selected keywords.
    """

    selected_syntactic: tuple[str, ...]
    keyword_groups: tuple[KeywordGroup, ...]
    cutoff_syntactic: float = DEFAULT_SYNTACTIC_CUTOFF
    signed_keywords: bool = True
    syntactic_probabilities: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "selected_syntactic", tuple(self.selected_syntactic))
        object.__setattr__(self, "keyword_groups", tuple(self.keyword_groups))
        for name in self.selected_syntactic:
            if name not in SYNTACTIC_FEATURES:
                raise FeatureSpecError(f"unknown syntactic feature {name!r}")
        if not 0.0 <= self.cutoff_syntactic <= 1.0:
            raise FeatureSpecError("syntactic cutoff must lie in [0, 1]")

    @property
    def n_features(self) -> int:
        return len(self.selected_syntactic) + len(self.keyword_groups)

    @property
    def feature_names(self) -> list[str]:
        return list(self.selected_syntactic) + [f"kw_{g.kind}" for g in self.keyword_groups]

    @property
    def cutoff_keywords(self) -> dict[str, float]:
        return {g.kind: g.cutoff for g in self.keyword_groups}

    def to_json(self) -> str:
        doc = {
            "format": _SPEC_FORMAT,
            "version": _SPEC_VERSION,
            "selected_syntactic": list(self.selected_syntactic),
            "cutoff_syntactic": self.cutoff_syntactic,
            "signed_keywords": self.signed_keywords,
            "syntactic_probabilities": dict(sorted(self.syntactic_probabilities.items())),
            "keyword_groups": [
                {"kind": g.kind, "cutoff": g.cutoff, "keywords": [[w, s] for w, s in g.keywords]}
                for g in self.keyword_groups
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "FeatureSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FeatureSpecError(f"feature spec is not valid JSON: {exc}") from None
        if doc.get("format") != _SPEC_FORMAT:
            raise FeatureSpecError("not a feature spec file")
        if doc.get("version") != _SPEC_VERSION:
            raise FeatureSpecError(f"unsupported feature spec version {doc.get('version')!r}")
        try:
            groups = tuple(
                KeywordGroup(g["kind"], tuple((w, s) for w, s in g["keywords"]), g["cutoff"])
                for g in doc["keyword_groups"]
            )
            return cls(
                tuple(doc["selected_syntactic"]),
                groups,
                doc["cutoff_syntactic"],
                doc["signed_keywords"],
                doc.get("syntactic_probabilities", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FeatureSpecError(f"malformed feature spec: {exc}") from None


def fit_feature_spec(
    tagged: Sequence[TagSource],
    labels: Sequence[Union[Label, str, bool]],
    cutoff_syntactic: float = DEFAULT_SYNTACTIC_CUTOFF,
    cutoff_keywords: Optional[Mapping[str, float]] = None,
    groups: Sequence[str] = tuple(KEYWORD_GROUP_TAGS),
    signed_keywords: bool = True,
) -> FeatureSpec:
    ranking = rank_syntactic_features(tagged, cutoff_syntactic)
    cutoffs = dict(cutoff_keywords or {})
    kw = tuple(
        keyword_discrimination(tagged, labels, kind, cutoffs.get(kind, DEFAULT_KEYWORD_CUTOFF))
        for kind in groups
    )
    return FeatureSpec(ranking.selected, kw, cutoff_syntactic, signed_keywords, ranking.probabilities)


def extract_vector(tagged: TagSource, spec: FeatureSpec) -> list[float]:
    tokens = _tokens(tagged)
    counts = count_syntactic(tokens)
    values: list[float] = [float(counts[name]) for name in spec.selected_syntactic]
    for group in spec.keyword_groups:
        tags = KEYWORD_GROUP_TAGS[group.kind]
        words = [t.surface.lower() for t in tokens if t.pos in tags]
        if spec.signed_keywords:
            nfr_words, fr_words = group.nfr_words, group.fr_words
            values.append(float(sum(w in nfr_words for w in words) - sum(w in fr_words for w in words)))
        else:
            selected = group.words
            values.append(float(sum(w in selected for w in words)))
    return values


def extract_matrix(tagged: Sequence[TagSource], spec: FeatureSpec) -> list[list[float]]:
    return [extract_vector(t, spec) for t in tagged]
