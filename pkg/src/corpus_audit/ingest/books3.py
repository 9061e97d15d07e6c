"""Books3 metadata adapter.

Unparseable or missing author fields still produce one denominator record
whose surname is the ``UNPARSEABLE`` sentinel, so they can only lower the
match rate.
"""
from __future__ import annotations

import re
from collections.abc import Iterable, Iterator
from pathlib import Path
from typing import Any

from corpus_audit.frame import UNPARSEABLE
from corpus_audit.ingest._jsonio import MALFORMED, iter_json_entries
from corpus_audit.ingest.names import DEFAULT_PARTICLES, LAST_TOKEN, split_authors, surname_from_fullname
from corpus_audit.ingest.records import IngestSummary, PairRecord

DATASET = "books3"
_YEAR = re.compile(r"\b(1[5-9]\d\d|20\d\d)\b")
_YEAR_FIELDS = ("year", "publication_year", "publication_date", "published", "date")
_ID_FIELDS = ("id", "isbn", "title")


def _year(entry: dict[str, Any]) -> int | None:
    for key in _YEAR_FIELDS:
        value = entry.get(key)
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        if isinstance(value, str):
            m = _YEAR.search(value)
            if m:
                return int(m.group(1))
    return None


def _doc_id(entry: dict[str, Any], fallback: str) -> str:
    for key in _ID_FIELDS:
        value = entry.get(key)
        if isinstance(value, (str, int)) and str(value).strip():
            return str(value).strip()
    return fallback


def parse_books3(
    paths: Iterable[str | Path] | str | Path,
    summary: IngestSummary | None = None,
    *,
    surname_rule: str = LAST_TOKEN,
    particles: frozenset[str] = DEFAULT_PARTICLES,
) -> Iterator[PairRecord]:
    """One PairRecord per (book x author)."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    summary = summary if summary is not None else IngestSummary(DATASET)
    summary.surname_rule = surname_rule
    for path in paths:
        summary.files_seen += 1
        for index, entry in enumerate(iter_json_entries(path)):
            if entry is MALFORMED or not isinstance(entry, dict):
                summary.reject("malformed_record")
                continue
            summary.documents_seen += 1
            doc_id = _doc_id(entry, f"{Path(path).name}#{index}")
            year = _year(entry)
            authors = entry.get("authors", entry.get("author"))
            if isinstance(authors, str):
                names, how = split_authors(authors)
                summary.rule_hits[f"split_{how}"] += 1
            elif isinstance(authors, list):
                names = authors
                summary.rule_hits["split_list"] += 1
            else:
                names = []
            if not names:
                summary.authors_seen += 1
                summary.rule_hits["sentinel_missing"] += 1
                summary.emit()
                yield PairRecord(DATASET, doc_id, "", UNPARSEABLE, year)
                continue
            for name in names:
                summary.authors_seen += 1
                raw = name if isinstance(name, str) else ""
                surname, how = surname_from_fullname(raw, surname_rule, particles) if raw else (None, "")
                if surname is None:
                    surname = UNPARSEABLE
                    how = "sentinel_unparseable"
                summary.rule_hits[how] += 1
                summary.emit()
                yield PairRecord(DATASET, doc_id, raw, surname, year)
