"""LLM refinement without a network: record a scripted model once, then replay.

The stand-in model below only upper-cases what it is given; a real run
would use LiveTransport with an endpoint and an API key from the
environment.

Run: python demos/03_llm_replay.py
"""
import json
import tempfile
from pathlib import Path

from acrox.extract import build_table
from acrox.llm_resolve import (
    LlmConfig,
    RecordingTransport,
    ReplayTransport,
    chunk_table,
    render_prompt,
    resolve_all,
)
from acrox.preprocess import split_sentences


class Shouty:
    def send(self, prompt):
        block = prompt.split("\n", 1)[1].split("\n\nPlease follow", 1)[0]
        return "```json\n" + json.dumps({k: v.upper() for k, v in json.loads(block).items()}) + "\n```"


table = build_table(split_sentences("We use a large language model (LLM). TCP was fast. UDP too."))
chunks = chunk_table(table, 2)
print("chunks:", [c.keys for c in chunks])
print("\nfirst prompt:\n" + render_prompt(chunks[0]))

config = LlmConfig(chunk_size=2)
with tempfile.TemporaryDirectory() as tmp:
    fixture = Path(tmp) / "demo.jsonl"
    live = resolve_all(table, config, RecordingTransport(Shouty(), fixture))
    print("recorded", len(fixture.read_text().splitlines()), "exchanges")
    replayed = resolve_all(table, config, ReplayTransport(fixture))

print("same answers on replay:", live == replayed)
for key, value in replayed.items():
    print(f"  {key}: {value}")
