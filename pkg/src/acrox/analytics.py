"""Content statistics and result summaries for run reports.

Word counts skip stopwords, mirroring a counting stream in which stopwords
have been removed; character counts are taken on the text the sentences
were split from. Both conventions are recorded in the report schema.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Sequence

from .extract import AcronymOccurrence
from .ingest import CleanText
from .preprocess import SentenceStream
from .resources import default_stopwords

_EDGE_PUNCT = "\"'()[]{}.,;:!?"


@dataclass(frozen=True)
class ContentStats:
    character_count: int = 0
    word_count: int = 0
    sentence_count: int = 0
    acronym_occurrence_count: int = 0
    unique_acronym_count: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ResultSummary:
    mode: str
    total_acronyms: int
    expansions_found: int
    percent_found: float
    empty: bool

    def to_dict(self) -> dict:
        return asdict(self)


def count_words(text: str, stopwords: Iterable[str] | None = None) -> int:
    stops = default_stopwords() if stopwords is None else stopwords
    n = 0
    for token in text.split():
        word = token.strip(_EDGE_PUNCT)
        if any(c.isalnum() for c in word) and word.lower() not in stops:
            n += 1
    return n


def content_stats(clean: CleanText | str, stream: SentenceStream, occurrences: Sequence[AcronymOccurrence],
                  stopwords: Iterable[str] | None = None) -> ContentStats:
    """``occurrences`` should already have exclusions removed."""
    text = clean.text if isinstance(clean, CleanText) else clean
    return ContentStats(
        character_count=len(text),
        word_count=count_words(text, stopwords),
        sentence_count=len(stream),
        acronym_occurrence_count=len(occurrences),
        unique_acronym_count=len({o.canonical for o in occurrences}),
    )


def summarize_entries(entries: Sequence[Mapping], mode: str) -> ResultSummary:
    total = len(entries)
    found = sum(1 for e in entries if e.get("expansions"))
    return ResultSummary(mode, total, found, found / total if total else 0.0, total == 0)


def result_summary(report: Mapping) -> ResultSummary:
    """Summary for a single document report or a whole run report."""
    if "documents" in report:
        entries = [e for doc in report["documents"] for e in doc["entries"]]
    else:
        entries = report["entries"]
    return summarize_entries(entries, report["mode"])


STATS_COLUMNS = (
    "domain", "mode", "documents",
    "total_acronyms", "expansions_found", "percent_found", "empty",
    "avg_character_count", "avg_word_count", "avg_sentence_count",
    "avg_acronym_occurrence_count", "avg_unique_acronym_count",
)


def stats_rows(reports: Iterable[Mapping]) -> list[dict]:
    """One row per (domain, mode): summed result counts, per-document content averages."""
    groups: dict[tuple[str, str], list[Mapping]] = {}
    for report in reports:
        for doc in report["documents"]:
            key = (doc.get("domain") or report.get("domain") or "", doc["mode"])
            groups.setdefault(key, []).append(doc)
    rows = []
    for (domain, mode), docs in sorted(groups.items()):
        entries = [e for d in docs for e in d["entries"]]
        summary = summarize_entries(entries, mode)
        n = len(docs)
        row = {"domain": domain, "mode": mode, "documents": n}
        row.update({k: v for k, v in summary.to_dict().items() if k != "mode"})
        for field in ContentStats.__dataclass_fields__:
            row["avg_" + field] = sum(d["content_stats"][field] for d in docs) / n
        rows.append(row)
    return rows


def stats_csv(rows: Sequence[Mapping]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=STATS_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
