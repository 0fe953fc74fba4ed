"""Bundled example systems, one .ptrs file per named system."""

from __future__ import annotations

from importlib import resources

from .errors import UnknownCorpusError
from .parser import parse_ptrs
from .ptrs import Ptrs

_DIR = resources.files(__package__) / "corpus"


def corpus_names() -> list:
    names = [p.name[: -len(".ptrs")] for p in _DIR.iterdir() if p.name.endswith(".ptrs")]
    return sorted(names)


def corpus_text(name: str) -> str:
    path = _DIR / f"{name}.ptrs"
    try:
        return path.read_text()
    except FileNotFoundError:
        raise UnknownCorpusError(
            f"no bundled system named {name!r}; known: {', '.join(corpus_names())}"
        ) from None


def load(name: str) -> Ptrs:
    return parse_ptrs(corpus_text(name))
