from importlib import resources
from pathlib import Path

import pytest

from acrox.cli import RunConfig, run
from acrox.llm_resolve import LlmConfig

CORPUS = Path(str(resources.files("acrox").joinpath("data", "minicorpus")))
FIXTURES = CORPUS / "fixtures"
GOLDEN = Path(__file__).parent / "data" / "golden_combined.json"


def corpus_inputs():
    return sorted(CORPUS.glob("*.txt"))


def run_mode(mode, out=None, max_concurrency=4, **kwargs):
    """Run a mode on the bundled corpus, replaying fixtures for LLM modes."""
    fixture = FIXTURES / f"{mode}.jsonl" if mode in ("llm", "llm-pre", "combined") else None
    config = RunConfig(mode=mode, inputs=corpus_inputs(), out=out, fixture=fixture,
                       llm=LlmConfig(max_concurrency=max_concurrency), **kwargs)
    return run(config)


@pytest.fixture
def corpus():
    return corpus_inputs()


_criteria = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    label = dict(report.user_properties).get("criterion")
    if label:
        _criteria.append((label, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in sorted(_criteria):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {label}")
