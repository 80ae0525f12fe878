"""Run report assembly, validation and atomic JSON output (schema version 1)."""

from __future__ import annotations

import json
import logging
import os
import tempfile
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .analytics import ContentStats, result_summary, summarize_entries
from .extract import AcronymTable

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
MODES = ("regex", "regex-pre", "llm", "llm-pre", "combined")


class InvariantViolation(RuntimeError):
    pass


class ReportWriteError(OSError):
    pass


@lru_cache(maxsize=None)
def report_schema() -> dict:
    text = resources.files("acrox").joinpath("data", "report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _surfaces(entry) -> list[str]:
    seen: list[str] = []
    for occ in entry.occurrences:
        if occ.surface not in seen:
            seen.append(occ.surface)
    return seen


def table_entries(table: AcronymTable, llm: Mapping[str, str | None] | None = None) -> list[dict]:
    """Report entries for a regex table, optionally merged with LLM answers.

    An LLM answer is listed first (it is the adopted expansion); regex
    expansions are kept after it. When the answer repeats a regex expansion
    verbatim, that regex item is moved to the front instead.
    """
    out = []
    for key, entry in table.items():
        items = [{"text": text, "method": "regex-" + method} for text, method in entry.expansions.items()]
        answer = llm.get(key) if llm else None
        if answer:
            same = [i for i in items if i["text"] == answer]
            if same:
                items = same + [i for i in items if i["text"] != answer]
            else:
                if items:
                    log.info("%s: LLM expansion %r replaces regex %r", key, answer, [i["text"] for i in items])
                items = [{"text": answer, "method": "llm"}] + items
        out.append(_entry(key, _surfaces(entry), len(entry.occurrences), items, entry.context))
    return out


def discovered_entries(found: Mapping[str, Sequence[str]]) -> list[dict]:
    return [
        _entry(key, [key], 0, [{"text": v, "method": "llm"} for v in values], None)
        for key, values in found.items()
    ]


def _entry(canonical: str, surfaces: list[str], count: int, expansions: list[dict], context: str | None) -> dict:
    return {
        "canonical": canonical,
        "surfaces": surfaces,
        "occurrence_count": count,
        "expansions": expansions,
        "context": None if expansions else context,
        "status": "expanded" if expansions else "unresolved",
    }


def exclusion_records(table: AcronymTable) -> list[dict]:
    return [
        {
            "canonical": x.canonical,
            "surface": x.surface,
            "reason": x.reason,
            "sentence_index": x.sentence_index,
            "char_offset": x.char_offset,
        }
        for x in table.exclusions
    ]


def document_report(source_id: str, mode: str, entries: list[dict], exclusions: list[dict],
                    stats: ContentStats, domain: str = "") -> dict:
    return {
        "source_id": source_id,
        "mode": mode,
        "domain": domain,
        "entries": entries,
        "exclusions": exclusions,
        "content_stats": stats.to_dict(),
        "summary": summarize_entries(entries, mode).to_dict(),
    }


def run_report(mode: str, documents: list[dict], domain: str = "") -> dict:
    report = {"schema_version": SCHEMA_VERSION, "mode": mode, "domain": domain, "documents": documents}
    report["summary"] = result_summary(report).to_dict()
    return report


def check_report(report: Mapping, tables: Sequence[AcronymTable] | None = None) -> None:
    """Raise :class:`InvariantViolation` when the report is inconsistent.

    With ``tables`` (one per document, regex-based modes) every table key
    must appear exactly once among the document's entries.
    """
    if report.get("schema_version") != SCHEMA_VERSION:
        raise InvariantViolation("schema_version must be " + SCHEMA_VERSION)
    if report.get("mode") not in MODES:
        raise InvariantViolation(f"unknown mode {report.get('mode')!r}")
    docs = report["documents"]
    for i, doc in enumerate(docs):
        keys = [e["canonical"] for e in doc["entries"]]
        if len(keys) != len(set(keys)):
            raise InvariantViolation(f"{doc['source_id']}: duplicate entry keys")
        if tables is not None and keys != list(tables[i].keys()):
            raise InvariantViolation(f"{doc['source_id']}: entries do not match the acronym table")
        if doc["summary"] != summarize_entries(doc["entries"], doc["mode"]).to_dict():
            raise InvariantViolation(f"{doc['source_id']}: summary does not match entries")
        for e in doc["entries"]:
            if e["expansions"] and e["context"] is not None:
                raise InvariantViolation(f"{e['canonical']}: has both expansions and a context")
    if report["summary"] != result_summary(report).to_dict():
        raise InvariantViolation("run summary does not match entries")


def dumps(report: Mapping) -> str:
    return json.dumps(report, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def write_report(report: Mapping, path: str | Path) -> None:
    """Write UTF-8 JSON through a temp file in the target directory, then rename."""
    path = Path(path)
    data = dumps(report).encode("utf-8")
    try:
        fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent or ".")
    except OSError as exc:
        raise ReportWriteError(f"cannot write {path}: {exc}") from None
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        Path(tmp).unlink(missing_ok=True)
        raise ReportWriteError(f"cannot write {path}: {exc}") from None
