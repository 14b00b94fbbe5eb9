"""Token containers and the tokenizer used throughout preprocessing."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

__all__ = ["Token", "TemporalEntity", "Firing", "TaggedRequirement", "tokenize", "detokenize"]


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str = ""
    entity: Optional[str] = None  # "USER" / "PRODUCT"

    def __post_init__(self) -> None:
        if not self.surface:
            raise ValueError("token surface must be non-empty")

    def with_pos(self, pos: str) -> "Token":
        return replace(self, pos=pos)


@dataclass(frozen=True)
class TemporalEntity:
    kind: str  # TIME | DATE | DURATION | SET
    start: int
    end: int  # exclusive
    normalized: str
    unit: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in ("TIME", "DATE", "DURATION", "SET"):
            raise ValueError(f"bad temporal kind {self.kind!r}")
        if not 0 <= self.start < self.end:
            raise ValueError("temporal span must be non-empty")


@dataclass(frozen=True)
class Firing:
    """One rule application, kept for the audit log."""

    rule: str
    before: str
    after: str


@dataclass(frozen=True)
class TaggedRequirement:
    origin: str
    tokens: tuple[Token, ...]
    temporals: tuple[TemporalEntity, ...] = ()
    fired: tuple[Firing, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "temporals", tuple(self.temporals))
        object.__setattr__(self, "fired", tuple(self.fired))
        for ent in self.temporals:
            if ent.end > len(self.tokens):
                raise ValueError("temporal span outside token list")

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    @property
    def tags(self) -> list[str]:
        return [t.pos for t in self.tokens]

    @property
    def rewritten_text(self) -> str:
        return detokenize(self.surfaces)

    def rewrite(
        self,
        tokens: Sequence[Token],
        firings: Iterable[Firing] = (),
        temporals: Sequence[TemporalEntity] = (),
    ) -> "TaggedRequirement":
        return TaggedRequirement(
            self.origin, tuple(tokens), tuple(temporals), self.fired + tuple(firings)
        )


# Order matters: slash/dash-joined numerics ("24/7", "10:30", "12/31/2005")
# must win over the plain number pattern.
_TOKEN_RE = re.compile(
    r"""
    \d+(?:[/:×*\-]\d+)+                          # joined numerics
    | \d+(?:[.,]\d+)*%?(?![^\W_]|[-'’_.][^\W\d_])  # numbers, decimals, percentages
    | [^\W_]+(?:[-'’_.][^\W_]+)*                 # words and alphanumerics (MP3, 24-hour)
    | \S                                         # any other single character
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[str]:
    """Split text into word, number and punctuation tokens.

    Every non-whitespace character ends up in exactly one token, so joining the
    tokens reproduces the text with whitespace removed.
    """
    if not text or not text.strip():
        raise ValueError("cannot tokenize empty text")
    return _TOKEN_RE.findall(text)


_NO_SPACE_BEFORE = {".", ",", ";", ":", "!", "?", ")", "]", "}"}
_NO_SPACE_AFTER = {"(", "[", "{"}


def detokenize(surfaces: Sequence[str]) -> str:
    out: list[str] = []
    for i, s in enumerate(surfaces):
        if i and s not in _NO_SPACE_BEFORE and surfaces[i - 1] not in _NO_SPACE_AFTER:
            out.append(" ")
        out.append(s)
    return "".join(out)
