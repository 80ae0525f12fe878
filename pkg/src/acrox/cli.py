"""``acrox`` command line: run one of the five extraction modes, or aggregate reports.

Modes:

* ``regex``      pages joined as-is, sentence split, regex extraction
* ``regex-pre``  full cleanup stack, then regex extraction
* ``llm``        raw text sent to the model with a discovery prompt
* ``llm-pre``    cleaned text sent to the model with a discovery prompt
* ``combined``   cleanup, regex extraction, then LLM refinement of the table

Exit codes: 0 success, 2 unreadable input or unwritable output, 3 LLM
required but unavailable, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import glob
import json
import logging
import shlex
import subprocess
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from . import analytics, report as rpt
from .extract import DEFAULT_STOPWORD_THRESHOLD, build_table
from .ingest import EmptyDocument, parse_pages
from .llm_resolve import (
    DEFAULT_CHUNK_SIZE,
    Clock,
    LiveTransport,
    LlmConfig,
    LlmUnavailable,
    RecordingTransport,
    ReplayTransport,
    Transport,
    discover_all,
    resolve_all,
)
from .preprocess import correct_spelling, prepare_sentences
from .resources import load_dictionary, load_stopwords

log = logging.getLogger("acrox")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_LLM = 3
EXIT_INVARIANT = 4

LLM_MODES = ("llm", "llm-pre", "combined")
PRE_MODES = ("regex-pre", "llm-pre", "combined")


class InputError(RuntimeError):
    pass


@dataclass
class RunConfig:
    mode: str
    inputs: list[Path]
    out: Path | None = None
    stopword_threshold: float = DEFAULT_STOPWORD_THRESHOLD
    chunk_size: int = DEFAULT_CHUNK_SIZE
    llm: LlmConfig = field(default_factory=LlmConfig)
    converter: str | None = None
    fixture: Path | None = None
    record: bool = False
    stopwords: Path | None = None
    dictionary: Path | None = None
    spellcheck: bool = False
    domain: str = ""

    def __post_init__(self):
        if self.mode not in rpt.MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if not 0 <= self.stopword_threshold <= 1:
            raise ValueError("stopword threshold must be within [0, 1]")
        if self.chunk_size < 1:
            raise ValueError("chunk size must be >= 1")

    @property
    def preprocess(self) -> bool:
        return self.mode in PRE_MODES

    @property
    def needs_llm(self) -> bool:
        return self.mode in LLM_MODES


def make_transport(config: RunConfig) -> Transport:
    """Transport for LLM modes; raises :class:`LlmUnavailable` when none can be built."""
    if config.fixture is not None and not config.record:
        if not config.fixture.exists():
            raise LlmUnavailable(f"replay fixture {config.fixture} not found")
        return ReplayTransport(config.fixture)
    live = LiveTransport(config.llm)
    if config.fixture is not None:
        return RecordingTransport(live, config.fixture)
    return live


def read_input(path: Path, converter: str | None = None) -> str:
    if converter and path.suffix.lower() != ".txt":
        args = shlex.split(converter)
        if any("{input}" in a for a in args):
            args = [a.replace("{input}", str(path)) for a in args]
        else:
            args.append(str(path))
        try:
            proc = subprocess.run(args, capture_output=True, check=True)
        except (OSError, subprocess.CalledProcessError) as exc:
            raise InputError(f"converter failed on {path}: {exc}") from None
        data = proc.stdout
    else:
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8 text") from None


def process_document(source_id: str, text: str, config: RunConfig, transport: Transport | None = None,
                     clock: Clock | None = None, stopwords=None, dictionary=None) -> tuple[dict, object]:
    """One document through the configured mode; returns (document report, regex table)."""
    stopwords = load_stopwords(config.stopwords) if stopwords is None else stopwords
    doc = parse_pages(text, source_id)
    clean, stream = prepare_sentences(doc, preprocess=config.preprocess)
    if config.spellcheck and config.preprocess and dictionary:
        stream = correct_spelling(stream, dictionary)
    table = build_table(stream, stopwords, config.stopword_threshold)
    stats = analytics.content_stats(clean, stream, table.occurrences(), stopwords)

    if config.mode in ("regex", "regex-pre"):
        entries = rpt.table_entries(table)
    elif config.mode == "combined":
        llm = resolve_all(table, config.llm, transport, clock)
        entries = rpt.table_entries(table, llm)
    else:
        found = discover_all(stream.texts, config.llm, transport, clock)
        entries = rpt.discovered_entries(found)
        table = None
    exclusions = rpt.exclusion_records(table) if table is not None else []
    return rpt.document_report(source_id, config.mode, entries, exclusions, stats, config.domain), table


def run(config: RunConfig, transport: Transport | None = None, clock: Clock | None = None) -> dict:
    """Run a mode over all inputs and return the report; writes it when ``config.out`` is set.

    Preconditions are checked before any document is processed, so failures
    leave no partial output.
    """
    if config.needs_llm and transport is None:
        transport = make_transport(config)
    if config.llm.chunk_size != config.chunk_size:
        config = replace(config, llm=replace(config.llm, chunk_size=config.chunk_size))

    try:
        stopwords = load_stopwords(config.stopwords)
    except OSError as exc:
        raise InputError(f"cannot read stopword list: {exc}") from None
    dictionary = None
    if config.spellcheck:
        if config.dictionary is None:
            raise InputError("--spellcheck needs --dictionary")
        try:
            dictionary = load_dictionary(config.dictionary)
        except OSError as exc:
            raise InputError(f"cannot read dictionary: {exc}") from None

    texts = [(path.name, read_input(path, config.converter)) for path in config.inputs]
    documents = []
    tables = []
    for source_id, text in texts:
        try:
            doc_report, table = process_document(source_id, text, config, transport, clock, stopwords, dictionary)
        except EmptyDocument as exc:
            raise InputError(str(exc)) from None
        documents.append(doc_report)
        tables.append(table)
    report = rpt.run_report(config.mode, documents, config.domain)
    rpt.check_report(report, tables if config.mode not in ("llm", "llm-pre") else None)
    if config.out is not None:
        rpt.write_report(report, config.out)
    return report


# -- argument parsing ---------------------------------------------------------


def _run_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="acrox", description="Extract acronym-expansion pairs from documents.")
    p.add_argument("--config", type=Path,
                   help="JSON file of option defaults, keyed by long option name; flags override it")
    p.add_argument("--mode", choices=rpt.MODES)
    p.add_argument("--input", nargs="+", type=Path, dest="inputs")
    p.add_argument("--out", type=Path)
    p.add_argument("--stopword-threshold", type=float, default=DEFAULT_STOPWORD_THRESHOLD)
    p.add_argument("--chunk-size", type=int, default=DEFAULT_CHUNK_SIZE)
    p.add_argument("--endpoint")
    p.add_argument("--model", default=LlmConfig.model_name)
    p.add_argument("--api-key-env", default=LlmConfig.api_key_env)
    p.add_argument("--rate-limit", type=int, default=LlmConfig.requests_per_minute,
                   help="requests per minute")
    p.add_argument("--max-concurrency", type=int, default=LlmConfig.max_concurrency)
    p.add_argument("--max-retries", type=int, default=LlmConfig.max_retries)
    p.add_argument("--temperature", type=float, default=LlmConfig.temperature)
    p.add_argument("--fixture", type=Path)
    fx = p.add_mutually_exclusive_group()
    fx.add_argument("--replay", action="store_true")
    fx.add_argument("--record", action="store_true")
    p.add_argument("--converter", help="command template for non-.txt inputs, e.g. 'pdftotext -layout {input} -'")
    p.add_argument("--stopwords", type=Path)
    p.add_argument("--dictionary", type=Path)
    p.add_argument("--spellcheck", action="store_true")
    p.add_argument("--domain", default="")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


_PATH_OPTIONS = {"inputs", "out", "fixture", "stopwords", "dictionary"}


def _config_defaults(parser: argparse.ArgumentParser, path: Path) -> dict:
    """Option defaults from a JSON config file; unknown keys are rejected."""
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"config {path} must hold a JSON object")
    dests = {a.dest for a in parser._actions}
    defaults = {}
    for key, value in data.items():
        dest = "inputs" if key == "input" else key.replace("-", "_")
        if dest not in dests or dest in ("config", "help"):
            raise InputError(f"config {path}: unknown option {key!r}")
        if dest in _PATH_OPTIONS and value is not None:
            value = [Path(v) for v in value] if dest == "inputs" else Path(value)
        defaults[dest] = value
    return defaults


def parse_run_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = _run_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        parser.set_defaults(**_config_defaults(parser, args.config))
        args = parser.parse_args(argv)
    missing = [flag for flag, dest in (("--mode", "mode"), ("--input", "inputs"), ("--out", "out"))
               if getattr(args, dest) is None]
    if missing:
        parser.error("missing required options: " + ", ".join(missing))
    if args.mode not in rpt.MODES:
        parser.error(f"unknown mode {args.mode!r}")
    return args


def _stats_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="acrox stats", description="Aggregate run reports into a CSV table.")
    p.add_argument("--reports", nargs="+", required=True, help="report files or glob patterns")
    p.add_argument("--out", required=True, type=Path)
    return p


def stats_main(argv: Sequence[str]) -> int:
    args = _stats_parser().parse_args(argv)
    paths = sorted({Path(m) for pattern in args.reports for m in (glob.glob(pattern) or [pattern])})
    reports = []
    for path in paths:
        try:
            reports.append(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"acrox: cannot read report {path}: {exc}", file=sys.stderr)
            return EXIT_INPUT
    try:
        args.out.write_text(analytics.stats_csv(analytics.stats_rows(reports)), encoding="utf-8")
    except OSError as exc:
        print(f"acrox: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "stats":
        return stats_main(argv[1:])
    try:
        args = parse_run_args(argv)
    except InputError as exc:
        print(f"acrox: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if (args.replay or args.record) and args.fixture is None:
        print("acrox: --replay/--record need --fixture", file=sys.stderr)
        return EXIT_LLM
    try:
        llm = LlmConfig(
            endpoint=args.endpoint,
            model_name=args.model,
            temperature=args.temperature,
            max_retries=args.max_retries,
            requests_per_minute=args.rate_limit,
            max_concurrency=args.max_concurrency,
            api_key_env=args.api_key_env,
            chunk_size=args.chunk_size,
        )
        config = RunConfig(
            mode=args.mode,
            inputs=args.inputs,
            out=args.out,
            stopword_threshold=args.stopword_threshold,
            chunk_size=args.chunk_size,
            llm=llm,
            converter=args.converter,
            fixture=args.fixture,
            record=args.record,
            stopwords=args.stopwords,
            dictionary=args.dictionary,
            spellcheck=args.spellcheck,
            domain=args.domain,
        )
    except ValueError as exc:
        print(f"acrox: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        run(config)
    except LlmUnavailable as exc:
        print(f"acrox: LLM unavailable: {exc}", file=sys.stderr)
        return EXIT_LLM
    except (InputError, rpt.ReportWriteError) as exc:
        print(f"acrox: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except rpt.InvariantViolation as exc:
        print(f"acrox: internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
