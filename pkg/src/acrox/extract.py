"""Acronym identification and expansion extraction.

Acronyms are found with a word-bounded pattern that starts and ends with an
uppercase letter (optionally followed by a plural ``s``). Candidates that
look like Roman numerals, chromosome formulas, gene sequences, overly long
strings or digit-prefixed compound names are excluded and logged.

Expansions come from two parenthetical forms:

* forward, ``ACRONYM (expansion)``, validated by the share of stopwords in
  the parenthesized text;
* backward, ``expansion (ACRONYM)``, anchored on the acronym's first and
  last letters and trimmed when it captures too many words.

Acronyms that never get an expansion are given a two-sentence context (the
sentence before plus the containing sentence) for downstream resolution.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Literal

from .preprocess import SentenceStream
from .resources import default_stopwords

ACRONYM_RE = re.compile(r"\b[A-Z][A-Za-z-]*[A-Z]s?\b")

ROMAN_NUMERALS = frozenset(
    "I II III IV V VI VII VIII IX X XI XII XIII XIV XV XVI XVII XVIII XIX XX "
    "XXI XXII XXIII XXIV XXV XXVI XXVII XXVIII XXIX XXX".split()
)
CHROMOSOME_FORMULAS = frozenset("XX XY XO ZO XXYY ZW ZWW XXX XXXX XXXXX YYYYY".split())
GENE_LETTERS = frozenset("ATCGU")
GENE_MIN_LENGTH = 6
MAX_ACRONYM_LENGTH = 10
DEFAULT_STOPWORD_THRESHOLD = 1 / 3
CONTEXT_PREFIX = "(context)"

ExclusionReason = Literal["roman", "chromosome", "gene", "too_long", "digit_prefixed"]
Method = Literal["forward", "backward"]


def canonical_form(surface: str) -> str:
    if len(surface) > 1 and surface.endswith("s") and surface[-2].isupper():
        return surface[:-1]
    return surface


@dataclass(frozen=True)
class AcronymOccurrence:
    surface: str
    sentence_index: int
    char_offset: int

    @property
    def canonical(self) -> str:
        return canonical_form(self.surface)


@dataclass(frozen=True)
class Exclusion:
    canonical: str
    surface: str
    reason: ExclusionReason
    sentence_index: int
    char_offset: int


# Resolution outcomes


@dataclass(frozen=True)
class Expanded:
    expansion: str
    method: Method


@dataclass(frozen=True)
class Contextual:
    context: str


@dataclass(frozen=True)
class Excluded:
    reason: ExclusionReason


Resolution = Expanded | Contextual | Excluded


@dataclass
class TableEntry:
    occurrences: list[AcronymOccurrence] = field(default_factory=list)
    # expansion text -> method that first produced it; dicts keep insertion order
    expansions: dict[str, Method] = field(default_factory=dict)
    context: str | None = None

    @property
    def resolutions(self) -> list[Resolution]:
        if self.expansions:
            return [Expanded(text, method) for text, method in self.expansions.items()]
        if self.context is not None:
            return [Contextual(self.context)]
        return []


@dataclass
class AcronymTable:
    entries: dict[str, TableEntry] = field(default_factory=dict)
    exclusions: list[Exclusion] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: object) -> bool:
        return key in self.entries

    def __getitem__(self, key: str) -> TableEntry:
        return self.entries[key]

    def keys(self):
        return self.entries.keys()

    def items(self):
        return self.entries.items()

    def occurrences(self) -> list[AcronymOccurrence]:
        """Kept occurrences in document order."""
        occ = [o for e in self.entries.values() for o in e.occurrences]
        return sorted(occ, key=lambda o: (o.sentence_index, o.char_offset))


def scan_acronyms(sentence: str, sentence_index: int = 0) -> list[AcronymOccurrence]:
    return [AcronymOccurrence(m.group(0), sentence_index, m.start()) for m in ACRONYM_RE.finditer(sentence)]


def _digit_prefixed(sentence: str, offset: int) -> bool:
    i = offset - 1
    if i >= 0 and sentence[i] == "-":
        i -= 1
    return i >= 0 and sentence[i].isdecimal()


def exclusion_reason(canonical: str, sentence: str = "", offset: int = 0) -> ExclusionReason | None:
    """Why a candidate is not an acronym, or None when it should be kept.

    Checks run in a fixed order, so "XX" and "XXX" (both also chromosome
    formulas) report ``roman``.
    """
    if canonical in ROMAN_NUMERALS:
        return "roman"
    if canonical in CHROMOSOME_FORMULAS:
        return "chromosome"
    if len(canonical) >= GENE_MIN_LENGTH and set(canonical) <= GENE_LETTERS:
        return "gene"
    if len(canonical) > MAX_ACRONYM_LENGTH:
        return "too_long"
    if sentence and _digit_prefixed(sentence, offset):
        return "digit_prefixed"
    return None


def filter_candidates(occ: AcronymOccurrence, sentence: str) -> Excluded | None:
    reason = exclusion_reason(occ.canonical, sentence, occ.char_offset)
    return None if reason is None else Excluded(reason)


# -- forward pattern ----------------------------------------------------------

# word: starts with a letter; letters, digits, underscores and apostrophes;
# optional hyphenated continuations
_FORWARD_BODY = r"\s*\(((?:\b[a-zA-Z][\w'’]*(?:-[\w'’]+)*\b\s*)+)\)"


def match_forward(sentence: str, acronym: str) -> str | None:
    pattern = r"\b" + re.escape(acronym) + r"\b" + _FORWARD_BODY
    m = re.search(pattern, sentence)
    if not m:
        return None
    expansion = m.group(1).strip()
    return expansion or None


def stopword_ratio_ok(expansion: str, stopwords: Iterable[str] | None = None,
                      threshold: float = DEFAULT_STOPWORD_THRESHOLD) -> bool:
    tokens = [t.lower() for t in expansion.split()]
    if not tokens:
        return False
    stops = default_stopwords() if stopwords is None else stopwords
    hits = sum(1 for t in tokens if t in stops)
    return hits / len(tokens) <= threshold


# -- backward pattern ---------------------------------------------------------

_PHRASE_CHAR = re.compile(r"[a-zA-Z\s-]")


def match_backward(sentence: str, acronym: str) -> str | None:
    """Phrase right before ``(acronym)`` anchored on the acronym's letters.

    The phrase is made of ASCII letters, whitespace and hyphens, starts at a
    word that begins with the acronym's first letter (after whitespace or at
    the start of the sentence) and contains the last letter somewhere after
    that. Anchors are case-insensitive. The leftmost valid start wins, so the
    phrase may carry extra leading words; see :func:`refine_expansion`.
    """
    key = canonical_form(acronym)
    first, last = key[0].lower(), key[-1].lower()
    target = re.compile(r"\s*\(\b" + re.escape(acronym) + r"\b\)")
    for m in target.finditer(sentence):
        end = m.start()
        run_start = end
        while run_start > 0 and _PHRASE_CHAR.match(sentence[run_start - 1]):
            run_start -= 1
        for p in range(run_start, end):
            ch = sentence[p]
            if ch.lower() != first or not ch.isalpha():
                continue
            if p > 0 and not sentence[p - 1].isspace():
                continue
            if last in sentence[p + 1:end].lower():
                phrase = sentence[p:end].strip()
                if phrase:
                    return phrase
    return None


def refine_expansion(acronym: str, expansion: str) -> str:
    """Trim a backward match that has more words than the acronym has letters.

    Returns the longest word-suffix that starts with the acronym's first
    letter, contains its last letter after that, and has no more words than
    the acronym has characters. Falls back to the input when none qualifies.
    """
    words = expansion.split()
    limit = len(acronym)
    if len(words) <= limit:
        return expansion
    first, last = acronym[0].lower(), acronym[-1].lower()
    for i in range(len(words) - limit, len(words)):
        suffix = " ".join(words[i:])
        if suffix[0].lower() == first and last in suffix[1:].lower():
            return suffix
    return expansion


# -- context and table --------------------------------------------------------


def capture_context(stream: SentenceStream, occ: AcronymOccurrence) -> str:
    i = occ.sentence_index
    parts = [stream[i - 1].text] if i > 0 else []
    parts.append(stream[i].text)
    return CONTEXT_PREFIX + " " + " ".join(parts)


def _valid(expansion: str | None, canonical: str, surface: str) -> bool:
    return bool(expansion) and expansion not in (canonical, surface) and "(" not in expansion and ")" not in expansion


def build_table(stream: SentenceStream, stopwords: Iterable[str] | None = None,
                threshold: float = DEFAULT_STOPWORD_THRESHOLD) -> AcronymTable:
    stops = default_stopwords() if stopwords is None else frozenset(stopwords)
    table = AcronymTable()
    for sentence in stream:
        text = sentence.text
        tried: set[str] = set()
        for occ in scan_acronyms(text, sentence.index):
            excluded = filter_candidates(occ, text)
            if excluded is not None:
                table.exclusions.append(
                    Exclusion(occ.canonical, occ.surface, excluded.reason, occ.sentence_index, occ.char_offset)
                )
                continue
            key = occ.canonical
            entry = table.entries.setdefault(key, TableEntry())
            entry.occurrences.append(occ)
            if occ.surface in tried:
                continue
            tried.add(occ.surface)

            forward = match_forward(text, occ.surface)
            if _valid(forward, key, occ.surface) and stopword_ratio_ok(forward, stops, threshold):
                entry.expansions.setdefault(forward, "forward")
            backward = match_backward(text, occ.surface)
            if backward is not None:
                backward = refine_expansion(key, backward)
                if _valid(backward, key, occ.surface):
                    entry.expansions.setdefault(backward, "backward")

    for entry in table.entries.values():
        if not entry.expansions:
            entry.context = capture_context(stream, entry.occurrences[0])
    return table
