"""Tolerant readers for JSON-array, JSON-object and NDJSON metadata files."""
from __future__ import annotations

import gzip
import json
from collections.abc import Iterator
from pathlib import Path
from typing import IO, Any

# Stand-in yielded for NDJSON lines that do not decode.
MALFORMED = object()


def open_text(path: str | Path) -> IO[str]:
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, encoding="utf-8")


def _is_mapping_of_entries(doc: Any) -> bool:
    return isinstance(doc, dict) and bool(doc) and all(isinstance(v, dict) for v in doc.values())


def _expand(doc: Any) -> Iterator[Any]:
    if isinstance(doc, list):
        yield from doc
    elif _is_mapping_of_entries(doc):
        for key, entry in doc.items():
            yield {"id": key, **entry}
    else:
        yield doc


def iter_json_entries(path: str | Path) -> Iterator[Any]:
    """Yield metadata entries from ``path``.

    NDJSON is streamed line by line. A JSON array, or an object mapping ids to
    entries, is loaded whole.
    """
    with open_text(path) as f:
        first = ""
        for line in f:
            if line.strip():
                first = line
                break
        if not first:
            return
        try:
            head = json.loads(first)
        except json.JSONDecodeError:
            head = MALFORMED
        if isinstance(head, dict) and not _is_mapping_of_entries(head):
            yield head
            for line in f:
                if line.strip():
                    yield _loads(line)
            return
        if head is MALFORMED and first.lstrip()[:1] not in ("[", "{"):
            yield MALFORMED
            for line in f:
                if line.strip():
                    yield _loads(line)
            return
        text = first + f.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        for line in text.splitlines():
            if line.strip():
                yield _loads(line)
        return
    yield from _expand(doc)


def _loads(line: str) -> Any:
    try:
        return json.loads(line)
    except json.JSONDecodeError:
        return MALFORMED
