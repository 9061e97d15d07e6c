"""ArXiv metadata snapshot adapter (one JSON object per paper).

Uses the pre-split ``authors_parsed`` ([last, first, suffix]) when present and
falls back to splitting the free-text ``authors`` string.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator
from email.utils import parsedate_to_datetime
from pathlib import Path
from typing import Any

from corpus_audit.frame import NormalizationError, normalize_surname
from corpus_audit.ingest._jsonio import MALFORMED, iter_json_entries
from corpus_audit.ingest.names import LAST_TOKEN, split_authors, surname_from_fullname
from corpus_audit.ingest.records import IngestSummary, PairRecord

DATASET = "arxiv"


def submission_year(entry: dict[str, Any]) -> int | None:
    """Year of the first version, e.g. ``"Mon, 2 Apr 2007 19:18:42 GMT"`` -> 2007."""
    versions = entry.get("versions")
    if isinstance(versions, list) and versions and isinstance(versions[0], dict):
        created = versions[0].get("created")
        if isinstance(created, str):
            try:
                return parsedate_to_datetime(created).year
            except (TypeError, ValueError):
                pass
    return None


def _parsed_authors(entry: dict[str, Any]) -> list[tuple[str, str]] | None:
    parsed = entry.get("authors_parsed")
    if not isinstance(parsed, list):
        return None
    out = []
    for item in parsed:
        if isinstance(item, list) and item and all(isinstance(x, str) for x in item):
            last, first = item[0], item[1] if len(item) > 1 else ""
            out.append((last, f"{first} {last}".strip()))
        else:
            out.append(("", ""))
    return out


def parse_arxiv(
    paths: Iterable[str | Path] | str | Path,
    summary: IngestSummary | None = None,
    *,
    surname_rule: str = LAST_TOKEN,
) -> Iterator[PairRecord]:
    """One PairRecord per (paper x author)."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    summary = summary if summary is not None else IngestSummary(DATASET)
    summary.surname_rule = f"authors_parsed last name, else {surname_rule}"
    for path in paths:
        summary.files_seen += 1
        for index, entry in enumerate(iter_json_entries(path)):
            if entry is MALFORMED or not isinstance(entry, dict):
                summary.reject("malformed_record")
                continue
            summary.documents_seen += 1
            doc_id = str(entry.get("id") or f"{Path(path).name}#{index}")
            year = submission_year(entry)
            parsed = _parsed_authors(entry)
            if parsed is not None:
                pairs = []
                for last, raw in parsed:
                    try:
                        pairs.append((normalize_surname(last) if last else None, raw))
                    except NormalizationError:
                        pairs.append((None, raw))
                summary.rule_hits["authors_parsed"] += len(pairs)
            else:
                field = entry.get("authors")
                names, how = split_authors(field) if isinstance(field, str) else ([], "missing")
                pairs = []
                for raw in names:
                    surname, rule = surname_from_fullname(raw, surname_rule)
                    summary.rule_hits[rule] += 1
                    pairs.append((surname, raw))
            for surname, raw in pairs:
                summary.authors_seen += 1
                if surname is None:
                    summary.reject("missing_surname")
                    continue
                summary.emit()
                yield PairRecord(DATASET, doc_id, raw, surname, year)
