"""Run every mode over the bundled mini-corpus and print a per-mode summary.

LLM modes replay the bundled fixtures, so nothing is sent over the network.

Run: python demos/04_corpus_report.py
"""
from importlib import resources
from pathlib import Path

from acrox.analytics import stats_csv, stats_rows
from acrox.cli import RunConfig, run
from acrox.report import MODES

corpus = Path(str(resources.files("acrox").joinpath("data", "minicorpus")))
inputs = sorted(corpus.glob("*.txt"))
print("documents:", ", ".join(p.name for p in inputs))

reports = []
for mode in MODES:
    fixture = corpus / "fixtures" / f"{mode}.jsonl"
    report = run(RunConfig(mode=mode, inputs=inputs, fixture=fixture if fixture.exists() else None,
                           domain="mini"))
    reports.append(report)
    s = report["summary"]
    print(f"{mode:10} {s['expansions_found']:3} / {s['total_acronyms']:3}  ({100 * s['percent_found']:.1f}%)")

print()
print(stats_csv(stats_rows(reports)))
