"""Acronym resolution through a chat-completion endpoint.

The acronym table is cut into small chunks, each rendered into a prompt and
sent through a :class:`Transport`. Calls are bounded by a thread pool
(``max_concurrency``) and a sliding-window :class:`RateGate`
(``requests_per_minute``). Replies are JSON objects mapping acronyms to
expansions; results are merged back in table order, so the outcome does not
depend on which call finished first.

Three transports are provided: :class:`LiveTransport` (HTTP),
:class:`ReplayTransport` (answers from a fixture file keyed by prompt hash)
and :class:`RecordingTransport` (wraps another transport and appends every
exchange to a fixture file).
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
import urllib.error
import urllib.request
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from .extract import CONTEXT_PREFIX, AcronymTable

log = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 15
MAX_CHUNK_SIZE = 20
WINDOW_SECONDS = 60.0


class TransportError(RuntimeError):
    def __init__(self, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class RetryableParseError(ValueError):
    """The reply was not a JSON object; the request should be sent again."""


class LlmUnavailable(RuntimeError):
    """No live endpoint/key and no replay fixture."""


@dataclass(frozen=True)
class LlmConfig:
    endpoint: str | None = None
    model_name: str = "gpt-4o-mini"
    temperature: float = 0.0
    max_retries: int = 2
    requests_per_minute: int = 60
    max_concurrency: int = 4
    api_key_env: str = "OPENAI_API_KEY"
    chunk_size: int = DEFAULT_CHUNK_SIZE
    timeout: float = 120.0

    def __post_init__(self):
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")
        if self.requests_per_minute < 1:
            raise ValueError("requests_per_minute must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    def api_key(self) -> str | None:
        return os.environ.get(self.api_key_env) or None


# -- prompt chunks ------------------------------------------------------------


@dataclass(frozen=True)
class PromptChunk:
    entries: tuple[tuple[str, str], ...]

    @property
    def keys(self) -> list[str]:
        return [k for k, _ in self.entries]

    @property
    def serialized(self) -> str:
        return json.dumps(dict(self.entries), indent=4, ensure_ascii=False)

    @classmethod
    def from_serialized(cls, text: str) -> PromptChunk:
        return cls(tuple(json.loads(text).items()))


def entry_value(expansions: Sequence[str], context: str | None) -> str:
    """The prompt value for one table key: its expansion(s) or its context."""
    if expansions:
        return "; ".join(expansions)
    return context or CONTEXT_PREFIX


def table_entries(table: AcronymTable) -> list[tuple[str, str]]:
    return [(key, entry_value(list(e.expansions), e.context)) for key, e in table.items()]


def chunk_entries(entries: Sequence[tuple[str, str]], max_entries: int = DEFAULT_CHUNK_SIZE) -> list[PromptChunk]:
    if max_entries < 1:
        raise ValueError("max_entries must be >= 1")
    size = min(max_entries, MAX_CHUNK_SIZE)
    return [PromptChunk(tuple(entries[i:i + size])) for i in range(0, len(entries), size)]


def chunk_table(table: AcronymTable, max_entries: int = DEFAULT_CHUNK_SIZE) -> list[PromptChunk]:
    return chunk_entries(table_entries(table), max_entries)


REFINE_TEMPLATE = """\
As an AI language model, you are tasked with refining a dictionary of acronyms and their explanations provided below:
{text}

Please follow these instructions carefully:

1. Each entry in the dictionary consists of an `ACRONYM` and its corresponding `value` (full form or context).
2. The `value` may contain the full form of the acronym or a context in which the acronym is used.
3. If the `value` does not start with "(context)", check the accuracy and conciseness of the full form and make adjustments as necessary.
4. If the `value` starts with "(context)", the full form of the acronym should be extracted based on the context provided.
5. If the full form cannot be determined from the context, use your best judgment to provide the most accurate and concise full form.
6. If you cannot determine the full form from the context, ignore the entry.
7. Ignore author names, publication titles, locations, roman numerals, and other proper nouns that are not acronyms.

Your output should be an updated dictionary in JSON format, adhering to the following structure:
{{
    "ACRONYM": "Full Expansion of the Acronym",
    "ANOTHER_ACRONYM": "Full Expansion of Another Acronym",
    ...
}}

Ensure the final dictionary is accurate, concise, and formatted correctly for JSON compatibility. Exclude any additional text, comments, notes, or explanations outside of the updated dictionary entries.
"""

# Discovery variant for whole-text runs (no regex table available). This
# wording is our own construction, modelled on the refinement prompt.
DISCOVER_TEMPLATE = """\
As an AI language model, you are tasked with finding every acronym in the scientific text provided below and its full form:
{text}

Please follow these instructions carefully:

1. Identify every acronym or initialism that appears in the text.
2. For each acronym, give its full form as defined or implied by the text.
3. If the full form is not stated in the text, use your best judgment to provide the most accurate and concise full form.
4. If you cannot determine the full form, ignore the acronym.
5. Ignore author names, publication titles, locations, roman numerals, and other proper nouns that are not acronyms.

Your output should be a dictionary in JSON format, adhering to the following structure:
{{
    "ACRONYM": "Full Expansion of the Acronym",
    "ANOTHER_ACRONYM": "Full Expansion of Another Acronym",
    ...
}}

Ensure the final dictionary is accurate, concise, and formatted correctly for JSON compatibility. Exclude any additional text, comments, notes, or explanations outside of the dictionary entries.
"""


def render_prompt(chunk: PromptChunk) -> str:
    if not chunk.entries:
        raise ValueError("cannot render an empty chunk")
    return REFINE_TEMPLATE.format(text=chunk.serialized)


def render_discovery_prompt(text: str) -> str:
    return DISCOVER_TEMPLATE.format(text=text)


def chunk_text(sentences: Sequence[str], max_chars: int = 12000) -> list[str]:
    """Greedy sentence packing for whole-text prompts; oversize sentences go alone."""
    chunks: list[str] = []
    current: list[str] = []
    size = 0
    for s in sentences:
        if current and size + len(s) + 1 > max_chars:
            chunks.append(" ".join(current))
            current, size = [], 0
        current.append(s)
        size += len(s) + 1
    if current:
        chunks.append(" ".join(current))
    return chunks


# -- replies ------------------------------------------------------------------

_FENCE_RE = re.compile(r"^```[A-Za-z0-9_-]*\s*\n?(.*?)\n?\s*```$", re.DOTALL)


@dataclass
class ParsedReply:
    expansions: dict[str, str]
    unresolved: list[str]
    dropped: list[str] = field(default_factory=list)


def _load_object(reply: str) -> dict:
    text = reply.strip()
    m = _FENCE_RE.match(text)
    if m:
        text = m.group(1).strip()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RetryableParseError(f"reply is not JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise RetryableParseError(f"reply is a JSON {type(obj).__name__}, not an object")
    return obj


def parse_reply(reply: str, requested: Iterable[str] | None = None) -> ParsedReply:
    """Parse a JSON reply; keys outside ``requested`` are dropped with a warning.

    With ``requested=None`` (discovery prompts) every string-valued key is kept.
    """
    obj = _load_object(reply)
    wanted = None if requested is None else list(requested)
    allowed = None if wanted is None else set(wanted)
    expansions: dict[str, str] = {}
    dropped: list[str] = []
    for key, value in obj.items():
        if allowed is not None and key not in allowed:
            log.warning("dropping key %r that was not in the request", key)
            dropped.append(key)
            continue
        if not isinstance(value, str) or not value.strip():
            log.warning("dropping key %r with non-text value", key)
            dropped.append(key)
            continue
        expansions[key] = value.strip()
    unresolved = [] if wanted is None else [k for k in wanted if k not in expansions]
    return ParsedReply(expansions, unresolved, dropped)


# -- clocks and rate limiting -------------------------------------------------


class Clock(Protocol):
    def now(self) -> float: ...

    def sleep(self, seconds: float) -> None: ...


class SystemClock:
    def now(self) -> float:
        return time.monotonic()

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            time.sleep(seconds)


class VirtualClock:
    """Test clock: each thread has its own timeline, advanced only by ``sleep``.

    Combined with :class:`RateGate` (which never grants before its latest
    grant) this gives deterministic schedules without real waiting.
    """

    def __init__(self, start: float = 0.0):
        self._start = start
        self._local = threading.local()

    def now(self) -> float:
        return getattr(self._local, "t", self._start)

    def sleep(self, seconds: float) -> None:
        self._local.t = self.now() + max(0.0, seconds)


class RateGate:
    """Sliding-window request limiter.

    ``acquire(now)`` returns 0.0 and records a permit when fewer than
    ``requests_per_minute`` permits fall in the 60 s before ``now``; otherwise
    it returns how long to wait. Permits are granted in non-decreasing time
    order: a caller whose clock reads earlier than the latest grant is asked
    to wait until that grant.
    """

    def __init__(self, requests_per_minute: int, window: float = WINDOW_SECONDS):
        if requests_per_minute < 1:
            raise ValueError("requests_per_minute must be >= 1")
        self.limit = requests_per_minute
        self.window = window
        self._grants: deque[float] = deque()
        self._latest = float("-inf")
        self._lock = threading.Lock()

    def acquire(self, now: float) -> float:
        with self._lock:
            if now < self._latest:
                return self._latest - now
            while self._grants and now - self._grants[0] >= self.window:
                self._grants.popleft()
            if len(self._grants) < self.limit:
                self._grants.append(now)
                self._latest = now
                return 0.0
            return self._grants[0] + self.window - now

    def wait(self, clock: Clock) -> float:
        """Block on ``clock`` until a permit is granted; returns the grant time."""
        while True:
            now = clock.now()
            delay = self.acquire(now)
            if delay <= 0:
                return now
            clock.sleep(delay)


def rate_gate(gate: RateGate, now: float) -> float:
    return gate.acquire(now)


# -- transports ---------------------------------------------------------------


class Transport(Protocol):
    def send(self, prompt: str) -> str: ...


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def read_fixture(path: str | Path) -> dict[str, str]:
    records: dict[str, str] = {}
    p = Path(path)
    if not p.exists():
        return records
    with p.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rec = json.loads(line)
                records[rec["prompt_hash"]] = rec["reply_text"]
    return records


class ReplayTransport:
    def __init__(self, fixture: str | Path):
        self.path = Path(fixture)
        if not self.path.exists():
            raise FileNotFoundError(self.path)
        self.records = read_fixture(self.path)

    def send(self, prompt: str) -> str:
        try:
            return self.records[prompt_hash(prompt)]
        except KeyError:
            raise TransportError(f"no fixture reply for prompt {prompt_hash(prompt)[:12]}") from None


class RecordingTransport:
    def __init__(self, inner: Transport, fixture: str | Path):
        self.inner = inner
        self.path = Path(fixture)
        self._lock = threading.Lock()

    def send(self, prompt: str) -> str:
        reply = self.inner.send(prompt)
        record = json.dumps({"prompt_hash": prompt_hash(prompt), "reply_text": reply}, ensure_ascii=False)
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(record + "\n")
        return reply


class LiveTransport:
    """POSTs an OpenAI-style chat-completion request."""

    def __init__(self, config: LlmConfig):
        if not config.endpoint:
            raise LlmUnavailable("no endpoint configured")
        key = config.api_key()
        if not key:
            raise LlmUnavailable(f"environment variable {config.api_key_env} is not set")
        self.config = config
        self._key = key

    def send(self, prompt: str) -> str:
        body = json.dumps({
            "model": self.config.model_name,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }).encode("utf-8")
        req = urllib.request.Request(
            self.config.endpoint,
            data=body,
            headers={"Content-Type": "application/json", "Authorization": f"Bearer {self._key}"},
            method="POST",
        )
        try:
            with urllib.request.urlopen(req, timeout=self.config.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            retry_after = exc.headers.get("Retry-After") if exc.headers else None
            raise TransportError(
                f"HTTP {exc.code} from endpoint",
                retry_after=float(retry_after) if retry_after and retry_after.isdigit() else None,
            ) from None
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as exc:
            raise TransportError(f"request failed: {exc}") from None
        try:
            return payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise TransportError("unexpected response shape") from None


# -- dispatch -----------------------------------------------------------------


@dataclass
class ChunkResult:
    expansions: dict[str, str]
    unresolved: list[str]
    error: str | None = None


def _exchange(prompt: str, requested: list[str] | None, transport: Transport, gate: RateGate,
              clock: Clock, max_retries: int) -> ChunkResult:
    error = None
    for attempt in range(max_retries + 1):
        gate.wait(clock)
        try:
            parsed = parse_reply(transport.send(prompt), requested)
        except TransportError as exc:
            error = str(exc)
            log.warning("transport error (attempt %d): %s", attempt + 1, exc)
            if exc.retry_after:
                clock.sleep(exc.retry_after)
            continue
        except RetryableParseError as exc:
            error = str(exc)
            log.warning("unparseable reply (attempt %d): %s", attempt + 1, exc)
            continue
        return ChunkResult(parsed.expansions, parsed.unresolved)
    return ChunkResult({}, list(requested or []), error)


def dispatch(prompts: Sequence[tuple[str, list[str] | None]], config: LlmConfig, transport: Transport,
             clock: Clock | None = None, gate: RateGate | None = None) -> list[ChunkResult]:
    """Send prompts concurrently; results come back in input order."""
    if not prompts:
        return []
    clock = clock or SystemClock()
    gate = gate or RateGate(config.requests_per_minute)
    with ThreadPoolExecutor(max_workers=config.max_concurrency) as pool:
        futures = [
            pool.submit(_exchange, prompt, requested, transport, gate, clock, config.max_retries)
            for prompt, requested in prompts
        ]
        return [f.result() for f in futures]


def resolve_all(table: AcronymTable, config: LlmConfig, transport: Transport,
                clock: Clock | None = None, gate: RateGate | None = None) -> dict[str, str | None]:
    """LLM expansion for every table key, in table order; ``None`` = unresolved."""
    chunks = chunk_table(table, config.chunk_size)
    prompts = [(render_prompt(c), c.keys) for c in chunks]
    results = dispatch(prompts, config, transport, clock, gate)
    resolved: dict[str, str | None] = {}
    for chunk, result in zip(chunks, results):
        for key in chunk.keys:
            resolved[key] = result.expansions.get(key)
    return resolved


def discover_all(sentences: Sequence[str], config: LlmConfig, transport: Transport,
                 clock: Clock | None = None, gate: RateGate | None = None,
                 max_chars: int = 12000) -> dict[str, list[str]]:
    """Whole-text extraction: every acronym the model reports, with all distinct expansions."""
    prompts = [(render_discovery_prompt(t), None) for t in chunk_text(sentences, max_chars)]
    found: dict[str, list[str]] = {}
    for result in dispatch(prompts, config, transport, clock, gate):
        for key, value in result.expansions.items():
            values = found.setdefault(key, [])
            if value not in values:
                values.append(value)
    return found
