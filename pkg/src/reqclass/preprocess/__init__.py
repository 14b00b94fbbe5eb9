"""Rule-based requirement preprocessing."""

from .cooccurrence import CooccurrenceIndex, build_cooccurrence
from .entities import EntityDictionary, default_dictionary, entity_blind, load_dictionary
from .pipeline import PreprocessConfig, corpus_cooccurrence, preprocess_corpus, preprocess_pipeline, preprocess_text
from .rules import RewriteRule, RuleFileError, apply_nfr_rules, default_rules, load_rules, parse_rules
from .tagger import LexiconTagger, Tagger, pos_tag
from .temporal import apply_temporal_rules, normalize_surface, temporal_tag
from .tokens import Firing, TaggedRequirement, TemporalEntity, Token, detokenize, tokenize

__all__ = [
    "CooccurrenceIndex", "build_cooccurrence",
    "EntityDictionary", "default_dictionary", "entity_blind", "load_dictionary",
    "PreprocessConfig", "corpus_cooccurrence", "preprocess_corpus", "preprocess_pipeline", "preprocess_text",
    "RewriteRule", "RuleFileError", "apply_nfr_rules", "default_rules", "load_rules", "parse_rules",
    "LexiconTagger", "Tagger", "pos_tag",
    "apply_temporal_rules", "normalize_surface", "temporal_tag",
    "Firing", "TaggedRequirement", "TemporalEntity", "Token", "detokenize", "tokenize",
]
