"""Entity blinding: project-specific actors and products become USER / PRODUCT."""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Sequence

from .tokens import Firing, TaggedRequirement, Token, detokenize

__all__ = ["EntityDictionary", "load_dictionary", "default_dictionary", "entity_blind", "ENTITY_KINDS"]

ENTITY_KINDS = ("USER", "PRODUCT")

# tags allowed inside the pre-modifier run of a noun phrase ("registered", "nursing", ...)
_PREMODIFIER_TAGS = frozenset({"JJ", "JJR", "JJS", "VBN", "VBG", "NN", "NNS", "NNP", "NNPS"})
_NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})


@dataclass(frozen=True)
class EntityDictionary:
    entries: Mapping[tuple[str, ...], str]

    def __post_init__(self) -> None:
        for phrase, kind in self.entries.items():
            if kind not in ENTITY_KINDS:
                raise ValueError(f"bad entity kind {kind!r} for {' '.join(phrase)!r}")
        object.__setattr__(self, "max_len", max((len(p) for p in self.entries), default=0))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, str]]) -> "EntityDictionary":
        entries: dict[tuple[str, ...], str] = {}
        for phrase, kind in pairs:
            key = tuple(phrase.lower().split())
            if not key:
                continue
            if key in entries and entries[key] != kind:
                raise ValueError(f"{phrase!r} is mapped to both {entries[key]} and {kind}")
            entries[key] = kind
        return cls(entries)

    def match(self, words: Sequence[str], start: int) -> tuple[int, str] | None:
        """Longest dictionary phrase starting at ``start``: (length, kind)."""
        for length in range(min(self.max_len, len(words) - start), 0, -1):
            key = tuple(w.lower() for w in words[start : start + length])
            kind = self.entries.get(key)
            if kind is not None:
                return length, kind
        return None


def parse_dictionary(text: str) -> EntityDictionary:
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        phrase, sep, kind = line.rpartition("\t")
        if not sep:
            raise ValueError(f"dictionary line {lineno}: expected '<phrase>\\t<USER|PRODUCT>'")
        pairs.append((phrase.strip(), kind.strip().upper()))
    return EntityDictionary.from_pairs(pairs)


def load_dictionary(path: str | os.PathLike) -> EntityDictionary:
    with open(path, encoding="utf-8") as fh:
        return parse_dictionary(fh.read())


def default_dictionary() -> EntityDictionary:
    text = resources.files(__package__).joinpath("data/srs_dictionary.tsv").read_text("utf-8")
    return parse_dictionary(text)


def _entity_token(kind: str) -> Token:
    return Token(kind, "NNP", kind)


def entity_blind(tagged: TaggedRequirement, dictionary: EntityDictionary) -> TaggedRequirement:
    """Replace dictionary hits by USER/PRODUCT and collapse the noun phrases they head.

    Only pre-modifiers are absorbed ("registered USER" -> USER); determiners
    stay, and an entity used as a modifier ("USER interface") is left alone.
    """
    tokens = list(tagged.tokens)
    words = [t.surface for t in tokens]
    firings: list[Firing] = []

    # pass 1: dictionary lookup, longest match first
    out: list[Token] = []
    i = 0
    while i < len(tokens):
        hit = dictionary.match(words, i)
        if hit is None:
            out.append(tokens[i])
            i += 1
            continue
        length, kind = hit
        span = words[i : i + length]
        if not (length == 1 and span[0] == kind):
            firings.append(Firing(f"entity:{kind}", detokenize(span), kind))
        out.append(_entity_token(kind))
        i += length

    # pass 2: absorb pre-modifiers of entity-headed noun phrases
    result: list[Token] = []
    for idx, tok in enumerate(out):
        if tok.entity is None:
            result.append(tok)
            continue
        nxt = out[idx + 1] if idx + 1 < len(out) else None
        if nxt is not None and nxt.entity is None and nxt.pos in _NOUN_TAGS:
            result.append(tok)  # modifier, not head
            continue
        absorbed: list[Token] = []
        while result and result[-1].pos in _PREMODIFIER_TAGS:
            absorbed.insert(0, result.pop())
        if absorbed:
            before = detokenize([t.surface for t in absorbed] + [tok.surface])
            firings.append(Firing(f"entity-np:{tok.entity}", before, tok.entity))
        result.append(tok)

    return tagged.rewrite(result, firings, ())
