"""Deterministic lexicon + suffix-rule part-of-speech tagger (Penn tag set).

Tagging happens in two passes. Each token first gets a lexical guess from the
bundled lexicon or, for unknown words, from suffix heuristics. A small set of
left-to-right context rules then fixes the common requirement-text
ambiguities: verbs after modals and ``to``, participles after forms of *be*,
3rd-person verbs after a subject, and so on.

Any object with a ``tag(surfaces) -> list[str]`` method can stand in for
:class:`LexiconTagger` in the pipeline.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources
from typing import Protocol, Sequence

from .tokens import Token

__all__ = ["PENN_TAGS", "Tagger", "LexiconTagger", "default_tagger", "pos_tag"]

PENN_TAGS = frozenset(
    """CC CD DT EX FW IN JJ JJR JJS LS MD NN NNS NNP NNPS PDT POS PRP PRP$ RB RBR
    RBS RP SYM TO UH VB VBD VBG VBN VBP VBZ WDT WP WP$ WRB
    . , : `` '' -LRB- -RRB- # $""".split()
)

_PUNCT = {
    ".": ".", "!": ".", "?": ".",
    ",": ",",
    ":": ":", ";": ":", "-": ":", "--": ":", "…": ":",
    "(": "-LRB-", "[": "-LRB-", "{": "-LRB-",
    ")": "-RRB-", "]": "-RRB-", "}": "-RRB-",
    '"': "``", "“": "``", "”": "''", "'": "''", "`": "``", "‘": "``", "’": "''",
    "#": "#", "$": "$", "€": "$", "£": "$",
}

_NUMBER_RE = re.compile(r"^\d+(?:[.,:/×*\-]\d+)*%?$")
_NUMBER_WORDS = frozenset(
    """zero one two three four five six seven eight nine ten eleven twelve thirteen
    fourteen fifteen sixteen seventeen eighteen nineteen twenty thirty forty fifty
    sixty seventy eighty ninety hundred thousand million billion dozen""".split()
)
_BE = frozenset("be is are am was were been being".split())
_HAVE = frozenset("have has had having".split())

_JJ_SUFFIXES = ("ous", "ful", "able", "ible", "ive", "ical", "ic", "less", "ary", "ish")
_NN_SUFFIXES = (
    "tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship", "ism", "ist",
    "ure", "age", "ery", "dom", "hood",
)


class Tagger(Protocol):
    def tag(self, surfaces: Sequence[str]) -> list[str]: ...


def _load_lexicon() -> dict[str, tuple[str, ...]]:
    text = resources.files(__package__).joinpath("data/lexicon.txt").read_text("utf-8")
    lexicon: dict[str, tuple[str, ...]] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tags, _, words = line.partition(":")
        readings = tuple(tags.strip().split("|"))
        for tag in readings:
            if tag not in PENN_TAGS:
                raise ValueError(f"lexicon uses unknown tag {tag!r}")
        for word in words.split():
            if word in lexicon:
                raise ValueError(f"lexicon lists {word!r} twice")
            lexicon[word] = readings
    return lexicon


class LexiconTagger:
    def __init__(self, lexicon: dict[str, tuple[str, ...]] | None = None):
        self.lexicon = lexicon if lexicon is not None else _load_lexicon()

    def readings(self, word: str) -> tuple[str, ...]:
        return self.lexicon.get(word.lower(), ())

    def _verb_base(self, word: str) -> str | None:
        """Base form if ``word`` looks like an inflection of a known verb."""
        w = word.lower()
        candidates = [w]
        if w.endswith("ies"):
            candidates.append(w[:-3] + "y")
        if w.endswith("es"):
            candidates.append(w[:-2])
        if w.endswith("s"):
            candidates.append(w[:-1])
        if w.endswith("ied"):
            candidates.append(w[:-3] + "y")
        if w.endswith("ed"):
            candidates += [w[:-2], w[:-1]]
            if len(w) > 4 and w[-3] == w[-4]:
                candidates.append(w[:-3])
        if w.endswith("ing"):
            candidates += [w[:-3], w[:-3] + "e"]
            if len(w) > 5 and w[-4] == w[-5]:
                candidates.append(w[:-4])
        for c in candidates:
            if "VB" in self.readings(c):
                return c
        return None

    def _adj_base(self, word: str, suffix: str) -> bool:
        stem = word[: -len(suffix)]
        options = [stem, stem + "e"]
        if stem.endswith("i"):
            options.append(stem[:-1] + "y")
        if len(stem) > 2 and stem[-1] == stem[-2]:
            options.append(stem[:-1])
        return any("JJ" in self.readings(o) for o in options)

    def lexical(self, surface: str, index: int) -> str:
        """Context-free guess for one token."""
        if surface in _PUNCT:
            return _PUNCT[surface]
        if surface in ("USER", "PRODUCT"):
            return "NNP"
        w = surface.lower()
        if _NUMBER_RE.match(surface) or w in _NUMBER_WORDS:
            return "CD"
        readings = self.readings(w)
        if readings:
            return readings[0]
        if not any(ch.isalnum() for ch in surface):
            return "SYM"
        if any(ch.isdigit() for ch in surface):
            return "CD" if surface[0].isdigit() and "-" not in surface else "NN"
        if surface.isupper() and len(surface) > 1:
            return "NNP"
        if index > 0 and surface[0].isupper():
            return "NNP"
        if w.endswith("ly") and len(w) > 4:
            return "RB"
        if w.endswith("ing") and len(w) > 5:
            return "VBG"
        if w.endswith("ed") and len(w) > 4:
            return "VBN"
        if w.endswith("est") and self._adj_base(w, "est"):
            return "JJS"
        if w.endswith("er") and self._adj_base(w, "er"):
            return "JJR"
        if w.endswith(_NN_SUFFIXES):
            return "NN"
        if w.endswith(_JJ_SUFFIXES) or (w.endswith("al") and len(w) > 5):
            return "JJ"
        if w.endswith("s") and not w.endswith(("ss", "us", "is")) and len(w) > 3:
            return "NNS"
        return "NN"

    def tag(self, surfaces: Sequence[str]) -> list[str]:
        tags = [self.lexical(s, i) for i, s in enumerate(surfaces)]
        n = len(tags)
        for i in range(n):
            w = surfaces[i].lower()
            readings = self.readings(w)
            prev = tags[i - 1] if i > 0 else None
            nxt = tags[i + 1] if i + 1 < n else None
            # look through adverbs to the governing auxiliary: "shall not be", "must always respond"
            j = i - 1
            while j >= 0 and tags[j] in ("RB", "RBR"):
                j -= 1
            anchor = tags[j] if j >= 0 else None
            anchor_w = surfaces[j].lower() if j >= 0 else ""

            if anchor in ("MD", "TO"):
                unknown_verbish = not readings and tags[i] in ("NN", "VBP", "VBZ", "VBN", "VBD", "JJ")
                if "VB" in readings or unknown_verbish:
                    tags[i] = "VB"
                    continue
            if anchor_w in _BE or anchor_w in _HAVE:
                if w.endswith(("ed", "en")) and self._verb_base(w) and tags[i] in ("VBN", "VBD", "JJ", "NN"):
                    tags[i] = "VBN"
                    continue
            if w == "that":
                if prev in ("NN", "NNS", "NNP", "PRP"):
                    tags[i] = "WDT"
                elif nxt in ("NN", "NNS", "JJ", "NNP"):
                    tags[i] = "DT"
                else:
                    tags[i] = "IN"
                continue
            if w in ("more", "less", "most", "least"):
                adverbial = nxt in ("JJ", "RB")
                if w in ("more", "less"):
                    tags[i] = "RBR" if adverbial else "JJR"
                else:
                    tags[i] = "RBS" if adverbial else "JJS"
                continue
            if "RP" in readings and prev is not None and prev.startswith("VB"):
                tags[i] = "RP"
                continue
            if "RB" in readings and "JJ" in readings:
                # "respond fast" vs "fast response"
                if nxt in ("NN", "NNS", "NNP"):
                    tags[i] = "JJ"
                elif prev is not None and prev.startswith("VB"):
                    tags[i] = "RB"
                continue
            if tags[i] == "NNS" and prev in ("NN", "NNP", "PRP", "NNS", "WDT"):
                if self._verb_base(w) and nxt in ("DT", "PRP$", "IN", "TO", "NN", "NNS", "NNP", "CD", "JJ", "RB", "VBN"):
                    tags[i] = "VBZ"
                    continue
            if tags[i] == "NN" and "VB" in readings and prev in ("NNS", "PRP"):
                if nxt in ("DT", "PRP$", "IN", "TO", "NNP", "CD"):
                    tags[i] = "VBP"
                    continue
            if tags[i] == "VB":
                if prev in ("DT", "PRP$", "JJ", "POS"):
                    # noun use of a verb entry: "the return", "a quick restart"
                    tags[i] = "NN"
                elif prev in ("NNS", "PRP") or (prev in ("NN", "NNP") and nxt in ("DT", "PRP$", "NNP")):
                    tags[i] = "VBP"
                continue
            if tags[i] == "VBN" and prev in ("NN", "NNS", "NNP", "PRP") and nxt in ("DT", "PRP$", "NNP", "IN"):
                tags[i] = "VBD"
        return tags


@lru_cache(maxsize=1)
def default_tagger() -> LexiconTagger:
    return LexiconTagger()


def pos_tag(tokens: Sequence[Token] | Sequence[str], tagger: Tagger | None = None) -> list[Token]:
    """Return tokens with ``pos`` filled in."""
    if not tokens:
        raise ValueError("cannot tag an empty token list")
    toks = [t if isinstance(t, Token) else Token(t) for t in tokens]
    tags = (tagger or default_tagger()).tag([t.surface for t in toks])
    return [t.with_pos(tag) for t, tag in zip(toks, tags)]
