"""Word lists shipped with the package, and loaders for user-supplied ones."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path


def read_wordlist(path: str | Path) -> list[str]:
    """One entry per line, UTF-8; blank lines and ``#`` comments are skipped."""
    text = Path(path).read_text(encoding="utf-8")
    return _parse(text)


def _parse(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def _bundled(name: str) -> list[str]:
    return _parse(resources.files("acrox").joinpath("data", name).read_text(encoding="utf-8"))


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return frozenset(w.lower() for w in _bundled("stopwords.txt"))


@lru_cache(maxsize=None)
def default_abbreviations() -> tuple[str, ...]:
    return tuple(_bundled("abbreviations.txt"))


def load_stopwords(path: str | Path | None) -> frozenset[str]:
    if path is None:
        return default_stopwords()
    return frozenset(w.lower() for w in read_wordlist(path))


def load_dictionary(path: str | Path) -> frozenset[str]:
    return frozenset(w.lower() for w in read_wordlist(path))
