"""The full preprocessing chain and its configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..corpus import Corpus, Requirement
from ..text import stopwords
from .cooccurrence import CooccurrenceIndex, build_cooccurrence
from .entities import EntityDictionary, default_dictionary, entity_blind
from .rules import RewriteRule, apply_nfr_rules, default_rules
from .tagger import Tagger, pos_tag
from .temporal import apply_temporal_rules, normalize_surface, temporal_tag
from .tokens import TaggedRequirement, Token, tokenize

__all__ = ["PreprocessConfig", "preprocess_pipeline", "preprocess_text", "preprocess_corpus", "corpus_cooccurrence"]


@dataclass(frozen=True)
class PreprocessConfig:
    """Stage toggles plus the resources each stage needs.

    ``dictionary`` and ``rules`` default to the bundled SRS dictionary and
    Security rules. ``index`` is required for guarded rules to fire.
    """

    entities: bool = True
    temporal: bool = True
    nfr_rules: bool = True
    dictionary: Optional[EntityDictionary] = None
    rules: Optional[Sequence[RewriteRule]] = None
    index: Optional[CooccurrenceIndex] = None
    tagger: Optional[Tagger] = field(default=None, compare=False)

    @property
    def any_enabled(self) -> bool:
        return self.entities or self.temporal or self.nfr_rules

    def resolved(self) -> "PreprocessConfig":
        """Copy with bundled defaults filled in."""
        return PreprocessConfig(
            self.entities,
            self.temporal,
            self.nfr_rules,
            self.dictionary if self.dictionary is not None else default_dictionary(),
            tuple(self.rules) if self.rules is not None else tuple(default_rules()),
            self.index,
            self.tagger,
        )


def _tag(origin: str, text: str, config: PreprocessConfig) -> TaggedRequirement:
    tokens = pos_tag([Token(s) for s in tokenize(text)], config.tagger)
    return TaggedRequirement(origin, tokens)


def preprocess_pipeline(
    requirement: Requirement | str,
    config: PreprocessConfig = PreprocessConfig(),
) -> TaggedRequirement:
    """normalize -> tokenize -> tag -> entity blinding -> temporal tags/rules -> NFR rules.

    With every stage disabled the tokens are only tagged; use
    :func:`preprocess_text` to get the original string back verbatim.
    """
    if isinstance(requirement, Requirement):
        origin, text = requirement.id, requirement.text
    else:
        origin, text = "", requirement
    if not config.any_enabled:
        return _tag(origin, text, config)
    config = config.resolved()
    if config.temporal:
        text = normalize_surface(text)
    tagged = _tag(origin, text, config)
    if config.entities:
        tagged = entity_blind(tagged, config.dictionary)
    if config.temporal:
        tagged = tagged.rewrite(tagged.tokens, (), temporal_tag(tagged))
        tagged = apply_temporal_rules(tagged)
    if config.nfr_rules and config.rules:
        tagged = apply_nfr_rules(tagged, config.rules, config.index, stopwords())
    return tagged


def preprocess_text(text: str, config: PreprocessConfig = PreprocessConfig()) -> str:
    """Processed text of one requirement; the input itself when every stage is off."""
    if not config.any_enabled:
        return text
    return preprocess_pipeline(text, config).rewritten_text


def corpus_cooccurrence(corpus: Corpus, nfr_only: bool = True) -> CooccurrenceIndex:
    """Co-occurrence index over the corpus's (NFR) texts, stop words removed."""
    source = corpus.nfr() if nfr_only else corpus
    if not len(source):
        source = corpus
    return build_cooccurrence(source.texts, stopwords())


def preprocess_corpus(corpus: Corpus, config: PreprocessConfig = PreprocessConfig()) -> tuple[Corpus, list[TaggedRequirement]]:
    """Run the pipeline on every requirement.

    Without an explicit index, one is built from the corpus's NFR texts.
    """
    if config.nfr_rules and config.index is None and len(corpus):
        config = PreprocessConfig(
            config.entities, config.temporal, config.nfr_rules,
            config.dictionary, config.rules, corpus_cooccurrence(corpus), config.tagger,
        )
    if config.any_enabled:
        config = config.resolved()
    tagged = [preprocess_pipeline(r, config) for r in corpus.requirements]
    if not config.any_enabled:
        return corpus, tagged
    return corpus.with_texts([t.rewritten_text for t in tagged]), tagged
