"""Acronym-expansion extraction for scientific papers.

Pipeline: :mod:`acrox.ingest` (pages, headers, ligatures, hyphenation) ->
:mod:`acrox.preprocess` (region filters, sentences) -> :mod:`acrox.extract`
(regex identification and expansion) -> :mod:`acrox.llm_resolve` (chunked
chat-completion refinement) -> :mod:`acrox.report` / :mod:`acrox.analytics`.
"""

from .extract import AcronymTable, build_table, scan_acronyms
from .ingest import RawDocument, parse_pages
from .preprocess import prepare_sentences, split_sentences

__all__ = [
    "AcronymTable",
    "RawDocument",
    "build_table",
    "parse_pages",
    "prepare_sentences",
    "scan_acronyms",
    "split_sentences",
]

__version__ = "0.1.0"
