"""Walk one page-separated document through the cleanup stack.

Run: python demos/01_cleanup.py
"""
from acrox.ingest import parse_pages
from acrox.preprocess import prepare_sentences

raw = (
    "Journal of Examples\n"
    "A Study of Polymerases\n"
    "Abstract\n"
    "We look at eﬃcient transcription.\n"
    "1. Introduction\n"
    "RNA polymerase (RNAP) moves along the tem-\n"
    "plate. The rate depends on NTP levels.\n"
    "Page 1\f"
    "Journal of Examples\n"
    "∑ᵢ kᵢ·[NTP]ᵢ = ∂c/∂t\n"
    "RESULTS AND DISCUSSION\n"
    "Pausing was rare.\n"
    "References\n"
    "[1] A. Author, 2019.\n"
    "Page 2"
)

doc = parse_pages(raw, "demo.txt")
print("pages:", len(doc.pages))
for i, page in enumerate(doc.pages):
    print(f"  page {i}: {len(page)} lines")

# without cleanup the pages are only joined and split into sentences
_, raw_sentences = prepare_sentences(doc, preprocess=False)
print("\nsentences without cleanup:", len(raw_sentences))

clean, sentences = prepare_sentences(doc)
print("sentences after cleanup:  ", len(sentences))
for s in sentences:
    print(f"  [{s.index}] {s.text}")

# page spans still map the flowed text back to its pages
for i, (start, end) in enumerate(clean.page_spans):
    print(f"page {i} text: {clean.text[start:end]!r}")
