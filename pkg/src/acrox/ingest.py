"""Page-level ingestion of extracted document text.

Input is UTF-8 text with pages separated by form feeds, which is what most
PDF-to-text converters emit. The functions here split that text into pages,
drop running headers and footers, replace typographic ligatures, repair
line-break hyphenation and tidy whitespace.

String-level helpers (``replace_ligatures``, ``repair_hyphenation``,
``normalize_whitespace``) have ``CleanText`` counterparts that keep the
per-page offsets in step with the edited text.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

PAGE_SEPARATOR = "\f"

LIGATURES = {
    "ﬀ": "ff",
    "ﬁ": "fi",
    "ﬂ": "fl",
    "ﬃ": "ffi",
    "ﬄ": "ffl",
    "ﬅ": "ft",
    "ﬆ": "st",
}
_LIGATURE_TABLE = str.maketrans(LIGATURES)
_LIGATURE_RE = re.compile("[" + "".join(LIGATURES) + "]")

# "-\n" before a non-newline char, or a lone line break.
_LINEBREAK_RE = re.compile(r"-\n(?=([^\n]))|(?<!\n)\n(?!\n)")
_SPACE_RUN_RE = re.compile(r"[ \t]+")
_EDGE_SPACE_RE = re.compile(r"^ +| +$", re.MULTILINE)
_DIGITS_RE = re.compile(r"\d+")


class EmptyDocument(ValueError):
    """Raised when a document has no text at all."""


@dataclass(frozen=True)
class RawDocument:
    source_id: str
    pages: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not self.pages:
            raise ValueError("a document needs at least one page")


@dataclass(frozen=True)
class CleanText:
    """Normalized text plus the ``(start, end)`` offsets of each source page."""

    text: str
    page_spans: tuple[tuple[int, int], ...]

    def page_text(self, index: int) -> str:
        start, end = self.page_spans[index]
        return self.text[start:end]


def parse_pages(raw: str, source_id: str) -> RawDocument:
    if raw == "":
        raise EmptyDocument(f"{source_id}: empty input")
    raw = raw.replace("\r\n", "\n").replace("\r", "\n")
    chunks = raw.split(PAGE_SEPARATOR)
    if len(chunks) > 1 and chunks[-1] == "":
        chunks.pop()
    pages = tuple(tuple(chunk.split("\n")) if chunk else () for chunk in chunks)
    return RawDocument(source_id, pages)


def serialize_pages(doc: RawDocument) -> str:
    """Inverse of :func:`parse_pages` for documents without trailing empty pages."""
    return PAGE_SEPARATOR.join("\n".join(lines) for lines in doc.pages)


def _line_key(line: str) -> str:
    return _DIGITS_RE.sub("#", line.strip())


def _repeated(keys: Sequence[str | None]) -> list[bool]:
    counts = Counter(k for k in keys if k is not None)
    others = len(keys) - 1
    # count - 1 excludes the page itself
    return [k is not None and 2 * (counts[k] - 1) >= others for k in keys]


def _strip_once(pages: tuple[tuple[str, ...], ...]) -> tuple[tuple[str, ...], ...]:
    first = _repeated([_line_key(p[0]) if p else None for p in pages])
    last = _repeated([_line_key(p[-1]) if p else None for p in pages])
    out = []
    for lines, drop_first, drop_last in zip(pages, first, last):
        start = 1 if drop_first else 0
        end = len(lines) - 1 if drop_last else len(lines)
        out.append(lines[start:max(start, end)])
    return tuple(out)


def strip_headers_footers(doc: RawDocument) -> RawDocument:
    """Remove first/last lines that repeat on at least half of the other pages.

    Lines are compared after trimming and collapsing each digit run to a
    placeholder, so "Page 3" and "Page 12" are the same footer. Peeling is
    repeated until nothing changes, which handles multi-line headers and
    makes the operation idempotent.
    """
    if len(doc.pages) < 2:
        return doc
    pages = doc.pages
    while True:
        stripped = _strip_once(pages)
        if stripped == pages:
            break
        pages = stripped
    return RawDocument(doc.source_id, pages)


def replace_ligatures(text: str) -> str:
    return text.translate(_LIGATURE_TABLE)


def _linebreak_repl(m: re.Match) -> str:
    if m.group(1) is None:
        return " "
    return "" if m.group(1).islower() else "-"


def repair_hyphenation(text: str) -> str:
    """Join words broken across lines and flow lines into paragraphs.

    ``exper-\\niment`` becomes ``experiment``; a hyphen before an uppercase or
    non-letter continuation is kept (``LC-\\nMS`` -> ``LC-MS``). Single line
    breaks turn into spaces; blank lines (paragraph breaks) are left alone.
    """
    return _LINEBREAK_RE.sub(_linebreak_repl, text)


def normalize_whitespace(text: str) -> str:
    """Tabs to spaces, collapse space runs, trim each line."""
    return _EDGE_SPACE_RE.sub("", _SPACE_RUN_RE.sub(" ", text))


# -- offset-tracking edits on CleanText ---------------------------------------

Edit = tuple[int, int, str]


def apply_edits(clean: CleanText, edits: Iterable[Edit]) -> CleanText:
    """Apply sorted, non-overlapping ``(start, end, replacement)`` edits.

    Page boundaries that fall inside an edited range are moved to the end of
    its replacement; boundaries at or past the range shift by its length delta.
    """
    text = clean.text
    bounds = sorted({s for s, _ in clean.page_spans} | {e for _, e in clean.page_spans})
    mapped: dict[int, int] = {}
    parts: list[str] = []
    pos = 0
    out_len = 0
    bi = 0
    for start, end, repl in edits:
        parts.append(text[pos:start])
        out_len += start - pos
        while bi < len(bounds) and bounds[bi] <= start:
            mapped[bounds[bi]] = out_len - (start - bounds[bi])
            bi += 1
        parts.append(repl)
        out_len += len(repl)
        while bi < len(bounds) and bounds[bi] < end:
            mapped[bounds[bi]] = out_len
            bi += 1
        pos = end
    parts.append(text[pos:])
    for b in bounds[bi:]:
        mapped[b] = out_len + (b - pos)
    spans = tuple((mapped[s], mapped[e]) for s, e in clean.page_spans)
    return CleanText("".join(parts), spans)


def rewrite(clean: CleanText, pattern: re.Pattern, repl: Callable[[re.Match], str]) -> CleanText:
    edits = []
    for m in pattern.finditer(clean.text):
        new = repl(m)
        if new != m.group(0):
            edits.append((m.start(), m.end(), new))
    if not edits:
        return clean
    return apply_edits(clean, edits)


def to_clean(doc: RawDocument) -> CleanText:
    """Concatenate pages; every line is newline-terminated."""
    parts = []
    spans = []
    offset = 0
    for lines in doc.pages:
        page = "".join(line + "\n" for line in lines)
        parts.append(page)
        spans.append((offset, offset + len(page)))
        offset += len(page)
    return CleanText("".join(parts), tuple(spans))


def to_raw(clean: CleanText, source_id: str) -> RawDocument:
    pages = []
    for start, end in clean.page_spans:
        page = clean.text[start:end]
        if page.endswith("\n"):
            page = page[:-1]
        pages.append(tuple(page.split("\n")) if clean.text[start:end] else ())
    return RawDocument(source_id, tuple(pages))


def clean_ligatures(clean: CleanText) -> CleanText:
    return rewrite(clean, _LIGATURE_RE, lambda m: LIGATURES[m.group(0)])


def clean_whitespace(clean: CleanText) -> CleanText:
    clean = rewrite(clean, _SPACE_RUN_RE, lambda m: " ")
    return rewrite(clean, _EDGE_SPACE_RE, lambda m: "")


def flow_paragraphs(clean: CleanText) -> CleanText:
    """Hyphenation repair followed by whitespace cleanup, offsets preserved."""
    return clean_whitespace(rewrite(clean, _LINEBREAK_RE, _linebreak_repl))


def normalize_lines(doc: RawDocument) -> RawDocument:
    """Ligature replacement and whitespace cleanup on every line."""
    pages = tuple(
        tuple(normalize_whitespace(replace_ligatures(line)) for line in lines) for lines in doc.pages
    )
    return RawDocument(doc.source_id, pages)


def clean_document(doc: RawDocument) -> CleanText:
    """Line normalization, then header/footer removal.

    Normalizing first means header comparison sees the same text the later
    stages see. Line structure is kept so that line-oriented filters can run
    afterwards; call :func:`flow_paragraphs` once those are done.
    """
    return to_clean(strip_headers_footers(normalize_lines(doc)))
