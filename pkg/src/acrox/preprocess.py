"""Region filters and sentence segmentation.

The filters work on line-structured :class:`~acrox.ingest.CleanText` and
only ever delete whole lines (or truncate at a line start). Case,
punctuation and stopwords are left intact: expansion validation downstream
needs stopwords to still be there.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Iterator, Sequence

from .ingest import (
    CleanText,
    RawDocument,
    apply_edits,
    clean_document,
    flow_paragraphs,
    to_clean,
    to_raw,
)
from .resources import default_abbreviations

_NUMBERING = r"(?:(?:\d+(?:\.\d+)*|[ivxlc]+)\.?\s+)?"


def _heading_re(*names: str) -> re.Pattern:
    return re.compile(r"^" + _NUMBERING + "(?:" + "|".join(names) + r"):?$", re.IGNORECASE)


REFERENCES_HEADING = _heading_re("references", "bibliography")
ABSTRACT_HEADING = _heading_re("abstract")
INTRODUCTION_HEADING = _heading_re("introduction")

MATH_SYMBOL_THRESHOLD = 0.30
_PLAIN_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789" + ".,;:()-'\""
)
_SENTENCE_END = frozenset(".!?")


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    span: tuple[int, int]


@dataclass(frozen=True)
class SentenceStream:
    sentences: tuple[Sentence, ...] = ()

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    def __getitem__(self, index: int) -> Sentence:
        return self.sentences[index]

    @property
    def texts(self) -> list[str]:
        return [s.text for s in self.sentences]


def iter_lines(text: str) -> Iterator[tuple[int, int, str]]:
    """Yield ``(start, end, content)``; ``end`` includes the line terminator."""
    pos = 0
    n = len(text)
    while pos < n:
        nl = text.find("\n", pos)
        end = n if nl == -1 else nl + 1
        yield pos, end, text[pos:end].rstrip("\n")
        pos = end


def _drop_lines(clean: CleanText, predicate: Callable[[str], bool]) -> CleanText:
    edits = [(s, e, "") for s, e, line in iter_lines(clean.text) if predicate(line)]
    return apply_edits(clean, edits) if edits else clean


def strip_references(clean: CleanText) -> CleanText:
    """Truncate the text at the references/bibliography heading.

    The first heading wins so the operation is idempotent; everything after a
    bibliography heading is bibliography or appendix material anyway.
    """
    for start, _, line in iter_lines(clean.text):
        if REFERENCES_HEADING.match(line.strip()):
            return apply_edits(clean, [(start, len(clean.text), "")])
    return clean


def strip_front_matter(clean: CleanText) -> CleanText:
    if not clean.page_spans:
        return clean
    page_start, page_end = clean.page_spans[0]
    abstract_seen = False
    cut = None
    for start, end, line in iter_lines(clean.text):
        if start >= page_end:
            break
        if start < page_start:
            continue
        heading = line.strip()
        if not abstract_seen:
            abstract_seen = bool(ABSTRACT_HEADING.match(heading))
        elif INTRODUCTION_HEADING.match(heading):
            cut = end
    if cut is None:
        return clean
    return apply_edits(clean, [(0, cut, "")])


def symbol_fraction(line: str) -> float:
    chars = [c for c in line if not c.isspace()]
    if not chars:
        return 0.0
    exotic = sum(1 for c in chars if c not in _PLAIN_CHARS)
    return exotic / len(chars)


def is_math_line(line: str) -> bool:
    return symbol_fraction(line) > MATH_SYMBOL_THRESHOLD


def strip_math_lines(clean: CleanText) -> CleanText:
    return _drop_lines(clean, is_math_line)


def is_uppercase_heading(line: str) -> bool:
    stripped = line.strip()
    if len(stripped.split()) < 2 or stripped[-1] in _SENTENCE_END:
        return False
    letters = [c for c in stripped if c.isalpha()]
    return bool(letters) and all(c.isupper() for c in letters)


def strip_uppercase_headings(clean: CleanText) -> CleanText:
    return _drop_lines(clean, is_uppercase_heading)


def strip_regions(clean: CleanText) -> CleanText:
    clean = strip_references(clean)
    clean = strip_front_matter(clean)
    clean = strip_math_lines(clean)
    return strip_uppercase_headings(clean)


def preprocess_document(doc: RawDocument) -> CleanText:
    """The whole line-level cleanup stack; output is still line-structured.

    Region filters can expose new repeated first/last lines, so header and
    footer removal runs once more at the end.
    """
    clean = strip_regions(clean_document(doc))
    return clean_document(to_raw(clean, doc.source_id))


# -- sentence segmentation ----------------------------------------------------

_INITIAL_RE = re.compile(r"[(\[\"']?[A-Z]\.")
_DOTTED_RE = re.compile(r"[(\[\"']?(?:[A-Za-z]\.){2,}")
_PARAGRAPH_RE = re.compile(r"\n[ \t]*\n")


def _token_before(text: str, end: int) -> str:
    start = end
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:end]


def _guarded(text: str, period: int, abbreviations: Sequence[str]) -> bool:
    token = _token_before(text, period + 1)
    if _INITIAL_RE.fullmatch(token) or _DOTTED_RE.fullmatch(token):
        return True
    head = text[: period + 1]
    for abbr in abbreviations:
        if head.endswith(abbr):
            before = len(head) - len(abbr) - 1
            if before < 0 or not (text[before].isalnum()):
                return True
    return False


def _boundaries(text: str, abbreviations: Sequence[str]) -> Iterator[int]:
    n = len(text)
    paragraph_ends = {m.start() for m in _PARAGRAPH_RE.finditer(text)}
    for i, ch in enumerate(text):
        if i in paragraph_ends:
            yield i
            continue
        if ch not in _SENTENCE_END:
            continue
        j = i + 1
        if j < n and not text[j].isspace():
            continue
        while j < n and text[j].isspace():
            j += 1
        if j < n and not text[j].isupper():
            continue
        if ch == "." and _guarded(text, i, abbreviations):
            continue
        yield i + 1


def split_sentences(clean: CleanText | str, abbreviations: Iterable[str] | None = None) -> SentenceStream:
    """Segment at ``.``/``!``/``?`` + whitespace + uppercase letter (or end of text).

    Periods after single initials, dotted acronyms (``U.S.``) and the guard
    list (``e.g.``, ``Fig.``, ``et al.`` ...) do not end a sentence. Blank
    lines always do. Sentence text is whitespace-collapsed; spans index the
    input text.
    """
    text = clean.text if isinstance(clean, CleanText) else clean
    abbrs = tuple(default_abbreviations() if abbreviations is None else abbreviations)
    sentences = []
    start = 0
    for cut in [*_boundaries(text, abbrs), len(text)]:
        segment = text[start:cut]
        stripped = segment.strip()
        if stripped:
            lead = len(segment) - len(segment.lstrip())
            s = start + lead
            sentences.append(Sentence(len(sentences), " ".join(stripped.split()), (s, s + len(stripped))))
        start = cut
    return SentenceStream(tuple(sentences))


def prepare_sentences(doc: RawDocument, *, preprocess: bool = True,
                      abbreviations: Iterable[str] | None = None) -> tuple[CleanText, SentenceStream]:
    """Document to sentence stream, with or without the cleanup stack.

    Without cleanup the pages are only concatenated; sentence splitting still
    runs because it defines the unit of extraction.
    """
    if preprocess:
        clean = flow_paragraphs(preprocess_document(doc))
    else:
        clean = to_clean(doc)
    return clean, split_sentences(clean, abbreviations)


# -- optional spelling correction --------------------------------------------

_WORD_RE = re.compile(r"[^\W\d_]+")
_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def edits1(word: str) -> set[str]:
    """All strings one deletion, insertion, substitution or adjacent swap away."""
    splits = [(word[:i], word[i:]) for i in range(len(word) + 1)]
    deletes = {a + b[1:] for a, b in splits if b}
    swaps = {a + b[1] + b[0] + b[2:] for a, b in splits if len(b) > 1}
    subs = {a + c + b[1:] for a, b in splits if b for c in _ALPHABET}
    inserts = {a + c + b for a, b in splits for c in _ALPHABET}
    return (deletes | swaps | subs | inserts) - {word}


def spelling_fix(token: str, dictionary: frozenset[str] | set[str]) -> str | None:
    from .extract import ACRONYM_RE

    if not token.islower() or not token.isascii() or token in dictionary:
        return None
    if ACRONYM_RE.fullmatch(token):
        return None
    neighbours = edits1(token) & dictionary
    if len(neighbours) == 1:
        return next(iter(neighbours))
    return None


def correct_spelling(stream: SentenceStream, dictionary: frozenset[str] | set[str]) -> SentenceStream:
    """Replace lowercase tokens that have exactly one dictionary word one edit away.

    Edits are Damerau-style (adjacent transpositions count as one). Spans are
    left pointing at the uncorrected text.
    """

    def fix(m: re.Match) -> str:
        return spelling_fix(m.group(0), dictionary) or m.group(0)

    return SentenceStream(tuple(replace(s, text=_WORD_RE.sub(fix, s.text)) for s in stream))
