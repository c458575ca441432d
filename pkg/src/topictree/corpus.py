"""Document ingestion and token normalization.

Raw text is whitespace-split and each word goes through a fixed pipeline:
lowercasing, accent and ligature folding, in-place underscore masking of
every character outside [a-z0-9] and of leading digits, then a minimum
length filter and a stopword filter. Masking is in place, so token length
is preserved by it ("networks!" becomes "networks_", not "networks").

Stopword files are folded and masked with the same rules when loaded, so
entries like "won't" match the masked form "won_t" seen in documents.
"""

from __future__ import annotations

import csv
import json
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

MIN_TOKEN_LENGTH = 4

_ASCII = frozenset("abcdefghijklmnopqrstuvwxyz0123456789")
_DIGITS = frozenset("0123456789")

# Ligatures do not decompose canonically, so they are expanded explicitly.
_LIGATURES = str.maketrans({
    "æ": "ae",   # ae
    "œ": "oe",   # oe
    "ß": "ss",   # sharp s
    "ĳ": "ij",   # ij
    "ﬀ": "ff",
    "ﬁ": "fi",
    "ﬂ": "fl",
    "ﬃ": "ffi",
    "ﬄ": "ffl",
    "ﬅ": "st",   # long s + t
    "ﬆ": "st",
})


class CorpusError(ValueError):
    """Raised for unreadable inputs, malformed records, or duplicate ids."""


@dataclass(frozen=True)
class Document:
    """One document: stable id, calendar year, display title, token sequence."""

    id: str
    year: int
    title: str
    tokens: tuple[str, ...]


def _fold(word: str) -> str:
    """Lowercase, strip combining marks after canonical decomposition, expand ligatures."""
    word = word.lower()
    word = unicodedata.normalize("NFD", word)
    word = "".join(ch for ch in word if unicodedata.category(ch) != "Mn")
    return word.translate(_LIGATURES)


def _mask(word: str) -> str:
    """Replace characters outside [a-z0-9] and leading digits with underscores, in place."""
    out = []
    leading = True
    for ch in word:
        if ch not in _ASCII or (leading and ch in _DIGITS):
            out.append("_")
        else:
            leading = False
            out.append(ch)
    return "".join(out)


def normalize_text(
    raw: str,
    stopwords: frozenset[str] | set[str] = frozenset(),
    lemmatize: Callable[[str], str] | None = None,
) -> list[str]:
    """Turn raw text into the token sequence used everywhere downstream.

    ``lemmatize`` is an optional per-word hook applied before any other
    normalization; the default is the identity.
    """
    tokens = []
    for word in raw.split():
        if lemmatize is not None:
            word = lemmatize(word)
        token = _mask(_fold(word))
        if len(token) < MIN_TOKEN_LENGTH:
            continue
        if token in stopwords:
            continue
        if not token.strip("_"):
            continue
        tokens.append(token)
    return tokens


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load a stopword file (one entry per line, UTF-8).

    Without a path, the packaged English list is used. Entries pass through
    the same fold/mask rules as document words.
    """
    if path is None:
        text = resources.files("topictree.data").joinpath("english_stopwords.txt").read_text("utf-8")
    else:
        path = Path(path)
        try:
            text = path.read_text("utf-8")
        except OSError as exc:
            raise CorpusError(f"cannot read stopword file {path}: {exc}") from exc
    entries = set()
    for line in text.splitlines():
        line = line.strip()
        if line:
            entries.add(_mask(_fold(line)))
    return frozenset(entries)


def _require_fields(record: dict, where: str) -> tuple[str, int, str, str]:
    if not isinstance(record, dict):
        raise CorpusError(f"{where}: record is not an object")
    try:
        doc_id, year, title, text = record["id"], record["year"], record["title"], record["text"]
    except KeyError as exc:
        raise CorpusError(f"{where}: missing field {exc.args[0]!r}") from exc
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusError(f"{where}: id must be a non-empty string")
    try:
        year = int(year)
    except (TypeError, ValueError) as exc:
        raise CorpusError(f"{where}: year is not an integer") from exc
    return doc_id, year, str(title), str(text)


def _load_jsonl(path: Path) -> Iterable[tuple[str, int, str, str]]:
    try:
        lines = path.read_text("utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}: record {i}: invalid JSON: {exc}") from exc
        yield _require_fields(record, f"{path}: record {i}")


def _load_txt_dir(path: Path) -> Iterable[tuple[str, int, str, str]]:
    meta = path / "metadata.csv"
    if not meta.is_file():
        if not any(path.glob("*.txt")):
            return
        raise CorpusError(f"{path}: metadata.csv is missing")
    try:
        with meta.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
            fields = reader.fieldnames or []
    except OSError as exc:
        raise CorpusError(f"cannot read {meta}: {exc}") from exc
    for column in ("filename", "id", "year", "title"):
        if column not in fields:
            raise CorpusError(f"{meta}: missing column {column!r}")
    for i, row in enumerate(rows, start=1):
        name = row["filename"]
        try:
            text = (path / name).read_text("utf-8")
        except OSError as exc:
            raise CorpusError(f"{meta}: record {i}: cannot read {name!r}: {exc}") from exc
        yield _require_fields(
            {"id": row["id"], "year": row["year"], "title": row["title"], "text": text},
            f"{meta}: record {i}",
        )


def load_corpus(
    path: str | Path,
    format: str = "jsonl",
    stopwords: frozenset[str] | set[str] | None = None,
    lemmatize: Callable[[str], str] | None = None,
) -> list[Document]:
    """Load and normalize a corpus.

    ``format`` is "jsonl" (one {id, year, title, text} object per line) or
    "txt-dir" (a directory of .txt files plus a metadata.csv with columns
    filename, id, year, title). Document order follows the input records.
    """
    path = Path(path)
    if stopwords is None:
        stopwords = load_stopwords()
    if format == "jsonl":
        records = _load_jsonl(path)
    elif format == "txt-dir":
        if not path.is_dir():
            raise CorpusError(f"{path} is not a directory")
        records = _load_txt_dir(path)
    else:
        raise CorpusError(f"unknown corpus format {format!r}")

    docs: list[Document] = []
    seen: set[str] = set()
    for doc_id, year, title, text in records:
        if doc_id in seen:
            raise CorpusError(f"duplicate document id {doc_id!r}")
        seen.add(doc_id)
        docs.append(Document(doc_id, year, title, tuple(normalize_text(text, stopwords, lemmatize))))
    return docs
