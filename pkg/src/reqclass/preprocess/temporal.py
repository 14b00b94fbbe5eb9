"""Temporal normalization, tagging and the five temporal rewrite rules.

The tagger recognises four kinds of temporal expression over a token list:

* DURATION  ``5 seconds``, ``2-3 hours``, ``an hour``
* SET       ``every day``, ``daily``, ``24 hours per day``
* TIME      ``10:30``, ``2 pm``, ``midnight``
* DATE      ``12/31/2005``, ``January 5``, ``Monday``

Rates such as ``24 hours per day`` carry a *full coverage* flag when the
quantity fills the whole period (24 hours per day, 7 days per week, 365 days
per year). Rule R2 relies on it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .tokens import Firing, TaggedRequirement, TemporalEntity, Token, detokenize

__all__ = [
    "normalize_surface",
    "temporal_tag",
    "apply_temporal_rules",
    "POSITIVE_ADJECTIVES",
    "R1_TRIGGERS",
]

_SURFACE_RULES: list[tuple[re.Pattern[str], str]] = [
    (
        re.compile(r"\b24\s*[-/*x×]\s*7(?:\s*[-/*x×]\s*365)?(?![\d/])", re.IGNORECASE),
        "24 hours per day 365 days per year",
    ),
    (re.compile(r"\beveryday\b", re.IGNORECASE), "every day"),
    (re.compile(r"(?<=\d)(?=(?:secs?|mins?)\b)", re.IGNORECASE), " "),
    (re.compile(r"\bsecs?\b", re.IGNORECASE), "seconds"),
    (re.compile(r"\bmins?\b", re.IGNORECASE), "minutes"),
]


def normalize_surface(text: str) -> str:
    """Rewrite availability shorthands and abbreviated time units. Idempotent."""
    for pattern, repl in _SURFACE_RULES:
        text = pattern.sub(repl, text)
    return text


# seconds per unit; month/year use 30/365 days
_UNITS: dict[str, tuple[str, float]] = {}
for _names, _code, _secs in [
    (("millisecond", "milliseconds", "ms", "msec", "msecs"), "MS", 0.001),
    (("second", "seconds"), "S", 1),
    (("minute", "minutes"), "MIN", 60),
    (("hour", "hours", "hr", "hrs"), "H", 3600),
    (("day", "days"), "D", 86400),
    (("week", "weeks"), "W", 7 * 86400),
    (("month", "months"), "MO", 30 * 86400),
    (("year", "years"), "Y", 365 * 86400),
]:
    for _n in _names:
        _UNITS[_n] = (_code, _secs)

_FAST_UNITS = frozenset({"MS", "S", "MIN"})
_ISO = {"MS": "0.001S", "S": "S", "MIN": "M", "H": "H", "D": "D", "W": "W", "MO": "M", "Y": "Y"}

_NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6, "seven": 7, "eight": 8,
    "nine": 9, "ten": 10, "eleven": 11, "twelve": 12, "fifteen": 15, "twenty": 20,
    "thirty": 30, "forty": 40, "forty-five": 45, "fifty": 50, "sixty": 60, "ninety": 90,
    "hundred": 100, "half": 0.5, "a": 1, "an": 1, "few": 3, "several": 3, "couple": 2,
}
_NUM_RE = re.compile(r"^\d+(?:[.,]\d+)?(?:-\d+(?:[.,]\d+)?)?$")
_CLOCK_RE = re.compile(r"^([01]?\d|2[0-3]):([0-5]\d)$")
_SLASH_DATE_RE = re.compile(r"^\d{1,2}/\d{1,2}/\d{2,4}$|^\d{4}-\d{2}-\d{2}$")
_MONTHS = {
    m: i
    for i, m in enumerate(
        "january february march april may june july august september october november december".split(),
        start=1,
    )
}
_MONTHS.update({k[:3]: v for k, v in list(_MONTHS.items())})
# month names only count when capitalized, which keeps the modal "may" out
_WEEKDAYS = frozenset("monday tuesday wednesday thursday friday saturday sunday".split())
_FREQ_ADVERBS = {"daily": "D", "weekly": "W", "monthly": "MO", "hourly": "H", "yearly": "Y", "annually": "Y", "nightly": "D"}
_RATE_LINKS = frozenset({"per", "a", "an", "each", "every", "/"})
_AMPM = frozenset({"am", "pm", "a.m", "p.m", "a.m.", "p.m."})


def _number(word: str) -> float | None:
    w = word.lower()
    if _NUM_RE.match(w):
        first = w.split("-")[0].replace(",", "")
        try:
            return float(first)
        except ValueError:
            return None
    return _NUMBER_WORDS.get(w)


def _fmt(n: float) -> str:
    return str(int(n)) if float(n).is_integer() else f"{n:g}"


@dataclass(frozen=True)
class _Match:
    entity: TemporalEntity
    full_coverage: bool = False


def _quantity(words: Sequence[str], i: int) -> tuple[float, int] | None:
    """Parse ``NUM UNIT`` / ``NUM to NUM UNIT`` at i: (number, index of unit)."""
    n = _number(words[i])
    if n is None:
        return None
    j = i + 1
    if j + 1 < len(words) and words[j].lower() in ("to", "-") and _number(words[j + 1]) is not None:
        j += 2
    if j < len(words) and words[j].lower() == "of" and words[i].lower() == "couple":
        j += 1
    if j < len(words) and words[j].lower() in _UNITS:
        return n, j
    return None


def _match_at(words: Sequence[str], i: int) -> _Match | None:
    w = words[i].lower()
    n_words = len(words)

    # SET: every/each [other] [N] unit
    if w in ("every", "each"):
        j = i + 1
        if j < n_words and words[j].lower() == "other":
            j += 1
        count = 1.0
        if j < n_words and _number(words[j]) is not None and words[j].lower() not in ("a", "an"):
            count = _number(words[j]) or 1.0
            j += 1
        if j < n_words and words[j].lower() in _UNITS:
            code = _UNITS[words[j].lower()][0]
            return _Match(TemporalEntity("SET", i, j + 1, f"P{_fmt(count)}{_ISO[code]}", code))
    if w in _FREQ_ADVERBS:
        code = _FREQ_ADVERBS[w]
        return _Match(TemporalEntity("SET", i, i + 1, f"P1{_ISO[code]}", code))
    if w in ("once", "twice") and i + 2 < n_words and words[i + 1].lower() in _RATE_LINKS:
        unit = words[i + 2].lower()
        if unit in _UNITS:
            code = _UNITS[unit][0]
            return _Match(TemporalEntity("SET", i, i + 3, f"P1{_ISO[code]}", code))

    # TIME
    if _CLOCK_RE.match(w):
        end = i + 2 if i + 1 < n_words and words[i + 1].lower() in _AMPM else i + 1
        return _Match(TemporalEntity("TIME", i, end, f"T{w}"))
    if w in ("noon", "midnight", "midday"):
        return _Match(TemporalEntity("TIME", i, i + 1, "T12:00" if w != "midnight" else "T00:00"))
    if re.fullmatch(r"\d{1,2}", w) and i + 1 < n_words and words[i + 1].lower() in _AMPM:
        return _Match(TemporalEntity("TIME", i, i + 2, f"T{w}{words[i + 1].lower()[0]}"))

    # DATE
    if _SLASH_DATE_RE.match(w):
        return _Match(TemporalEntity("DATE", i, i + 1, w))
    if w in _WEEKDAYS or w in ("today", "tomorrow", "yesterday"):
        return _Match(TemporalEntity("DATE", i, i + 1, w))
    if w in _MONTHS and words[i][0].isupper():
        end = i + 1
        day = ""
        if end < n_words and re.fullmatch(r"\d{1,2}", words[end]):
            day = words[end].zfill(2)
            end += 1
        if end < n_words and words[end] == ",":
            if end + 1 < n_words and re.fullmatch(r"\d{4}", words[end + 1]):
                end += 1
        year = "XXXX"
        if end < n_words and re.fullmatch(r"\d{4}", words[end]):
            year = words[end]
            end += 1
        return _Match(TemporalEntity("DATE", i, end, f"{year}-{_MONTHS[w]:02d}" + (f"-{day}" if day else "")))

    # DURATION, possibly a rate (SET): N unit per/a period
    q = _quantity(words, i)
    if q is not None:
        n, u = q
        code, secs = _UNITS[words[u].lower()]
        j = u + 1
        if j + 1 < n_words and words[j].lower() in _RATE_LINKS and words[j + 1].lower() in _UNITS:
            pcode, psecs = _UNITS[words[j + 1].lower()]
            covered = abs(n * secs - psecs) <= 0.02 * psecs
            norm = f"P{_fmt(n)}{_ISO[code]}/P1{_ISO[pcode]}"
            return _Match(TemporalEntity("SET", i, j + 2, norm, code), full_coverage=covered)
        prefix = "PT" if code in ("MS", "S", "MIN", "H") else "P"
        return _Match(TemporalEntity("DURATION", i, u + 1, f"{prefix}{_fmt(n)}{_ISO[code]}", code))
    return None


def _scan(words: Sequence[str]) -> list[_Match]:
    found: list[_Match] = []
    i = 0
    while i < len(words):
        m = _match_at(words, i)
        if m is None:
            i += 1
            continue
        found.append(m)
        i = m.entity.end
    return found


def temporal_tag(tagged: TaggedRequirement | Sequence[Token]) -> list[TemporalEntity]:
    tokens = tagged.tokens if isinstance(tagged, TaggedRequirement) else tagged
    return [m.entity for m in _scan([t.surface for t in tokens])]


POSITIVE_ADJECTIVES = frozenset(
    "quick timely fast prompt immediate rapid speedy instant short reasonable acceptable swift".split()
)

# R1 expressions, longest first so that "no more than" wins over "in"
R1_TRIGGERS: tuple[tuple[str, ...], ...] = tuple(
    sorted(
        (
            tuple(p.split())
            for p in [
                "no longer than", "under", "no more than", "not be more than", "no later than",
                "no later", "in", "for less than", "at a maximum of", "at a maximum", "within",
            ]
        ),
        key=len,
        reverse=True,
    )
)

_GAP_TOKENS = frozenset({",", "and", "or", "/", "-"})


def _entities(tokens: Sequence[Token]) -> list[_Match]:
    return _scan([t.surface for t in tokens])


def _r1(tokens: list[Token]) -> tuple[list[Token], list[Firing]]:
    firings: list[Firing] = []
    for m in reversed(_entities(tokens)):
        ent = m.entity
        if ent.kind != "DURATION":
            continue
        start = ent.start
        consumed_trigger = False
        while True:
            for phrase in R1_TRIGGERS:
                k = len(phrase)
                if start - k >= 0 and tuple(t.surface.lower() for t in tokens[start - k : start]) == phrase:
                    consumed_trigger |= phrase != ("within",)
                    start -= k
                    break
            else:
                break
        if not consumed_trigger:
            continue
        before = detokenize([t.surface for t in tokens[start : ent.start]])
        tokens[start : ent.start] = [Token("within", "IN")]
        firings.append(Firing("temporal:R1", before, "within"))
    firings.reverse()
    return tokens, firings


def _r2(tokens: list[Token]) -> tuple[list[Token], list[Firing]]:
    matches = _entities(tokens)
    runs: list[list[_Match]] = []
    for m in matches:
        if runs:
            last = runs[-1][-1].entity
            gap = [t.surface.lower() for t in tokens[last.end : m.entity.start]]
            if len(gap) <= 1 and all(g in _GAP_TOKENS for g in gap):
                runs[-1].append(m)
                continue
        runs.append([m])
    firings: list[Firing] = []
    for run in reversed(runs):
        if not any(m.full_coverage for m in run):
            continue
        s, e = run[0].entity.start, run[-1].entity.end
        before = detokenize([t.surface for t in tokens[s:e]])
        tokens[s:e] = [Token("alltimes", "RB")]
        firings.append(Firing("temporal:R2", before, "alltimes"))
    firings.reverse()
    return tokens, firings


def _r3(tokens: list[Token]) -> tuple[list[Token], list[Firing]]:
    firings: list[Firing] = []
    for m in reversed(_entities(tokens)):
        ent = m.entity
        if ent.kind != "DURATION" or ent.unit not in _FAST_UNITS:
            continue
        if ent.start == 0 or tokens[ent.start - 1].surface.lower() != "within":
            continue
        s = ent.start - 1
        before = detokenize([t.surface for t in tokens[s : ent.end]])
        tokens[s : ent.end] = [Token("fast", "RB")]
        firings.append(Firing("temporal:R3", before, "fast"))
    firings.reverse()
    return tokens, firings


def _fast_token(prev: Token | None, nxt: Token | None) -> Token:
    if nxt is not None and nxt.pos.startswith("NN"):
        return Token("fast", "JJ")
    return Token("fast", "RB")


def _r4(tokens: list[Token]) -> tuple[list[Token], list[Firing]]:
    firings: list[Firing] = []
    out: list[Token] = []
    i = 0
    while i < len(tokens):
        w = tokens[i].surface.lower()
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if w in POSITIVE_ADJECTIVES and nxt is not None and nxt.surface.lower() == "time":
            after = tokens[i + 2] if i + 2 < len(tokens) else None
            out.append(_fast_token(out[-1] if out else None, after))
            firings.append(Firing("temporal:R4", f"{tokens[i].surface} {nxt.surface}", "fast"))
            i += 2
            continue
        if w in ("timely", "quick"):
            out.append(_fast_token(out[-1] if out else None, nxt))
            firings.append(Firing("temporal:R4", tokens[i].surface, "fast"))
            i += 1
            continue
        out.append(tokens[i])
        i += 1
    return out, firings


_R5_NUMBER = re.compile(r"^[89][0-9](?:\.[0-9])?%?$")


def _r5(tokens: list[Token]) -> tuple[list[Token], list[Firing]]:
    firings: list[Firing] = []
    out: list[Token] = []
    i = 0
    while i < len(tokens):
        if _R5_NUMBER.match(tokens[i].surface):
            j = i + 1
            if j < len(tokens) and tokens[j].surface.lower() in ("%", "percent"):
                j += 1
            while j < len(tokens) and tokens[j].pos in ("IN", "DT"):
                j += 1
            if j < len(tokens) and tokens[j].surface.lower() == "time":
                before = detokenize([t.surface for t in tokens[i : j + 1]])
                out.append(Token("alltimes", "RB"))
                firings.append(Firing("temporal:R5", before, "alltimes"))
                i = j + 1
                continue
        out.append(tokens[i])
        i += 1
    return out, firings


def apply_temporal_rules(tagged: TaggedRequirement) -> TaggedRequirement:
    """Apply R1..R5 in order and re-tag the temporal entities of the result.

    R1  a trigger run ("in no more than", "under", ...) before a DURATION becomes "within"
    R2  a run of temporal expressions containing a full-coverage rate becomes "alltimes"
    R3  "within" + DURATION in seconds/minutes becomes "fast"
    R4  "timely", "quick", or a positive adjective directly before "time" becomes "fast"
    R5  [8-9][0-9](.[0-9])?% (+ IN/DT tokens) + "time" becomes "alltimes"
    """
    tokens = list(tagged.tokens)
    firings: list[Firing] = []
    for rule in (_r1, _r2, _r3, _r4, _r5):
        tokens, fired = rule(tokens)
        firings.extend(fired)
    return tagged.rewrite(tokens, firings, temporal_tag(tokens))
