"""CourtListener opinions x people adapter.

Opinions are inner-joined to people on the author id. Opinions without an
author are filtered out; opinions whose author id is not in the people file are
rejected as dangling. A people file with a repeated id is refused outright
because the join would be ambiguous.
"""
from __future__ import annotations

import csv
import re
import sys
from collections.abc import Iterable, Iterator
from pathlib import Path
from typing import Any

from corpus_audit.errors import ConfigError
from corpus_audit.frame import NormalizationError, normalize_surname
from corpus_audit.ingest._jsonio import MALFORMED, iter_json_entries, open_text
from corpus_audit.ingest.records import IngestSummary, PairRecord

DATASET = "freelaw"
AUTHOR_COLUMNS = ("author_id", "author")
DATE_COLUMNS = ("date_filed", "date_created", "date")
_YEAR = re.compile(r"^\s*(\d{4})")

csv.field_size_limit(min(sys.maxsize, 2**31 - 1))


class AmbiguousJoinError(ConfigError):
    pass


def _rows(path: str | Path) -> Iterator[Any]:
    name = Path(path).name.lower()
    if name.endswith((".csv", ".csv.gz", ".tsv", ".tsv.gz")):
        delim = "\t" if ".tsv" in name else ","
        with open_text(path) as f:
            yield from csv.DictReader(f, delimiter=delim)
    else:
        yield from iter_json_entries(path)


def _clean_id(value: Any) -> str:
    if value is None:
        return ""
    text = str(value).strip()
    if text.endswith(".0") and text[:-2].isdigit():
        text = text[:-2]
    return "" if text.lower() in ("", "null", "none", "nan") else text


def load_people(path: str | Path) -> dict[str, dict[str, Any]]:
    people: dict[str, dict[str, Any]] = {}
    for i, row in enumerate(_rows(path)):
        if row is MALFORMED or not isinstance(row, dict):
            raise ConfigError(f"{path}: record {i} is not readable")
        pid = _clean_id(row.get("id"))
        if not pid:
            raise ConfigError(f"{path}: record {i} has no id")
        if pid in people:
            raise AmbiguousJoinError(f"{path}: duplicate person id {pid!r} (record {i})")
        people[pid] = row
    return people


def _year(row: dict[str, Any]) -> int | None:
    for col in DATE_COLUMNS:
        m = _YEAR.match(str(row.get(col) or ""))
        if m:
            return int(m.group(1))
    return None


def parse_freelaw(
    opinions: Iterable[str | Path] | str | Path,
    people_path: str | Path,
    summary: IngestSummary | None = None,
) -> Iterator[PairRecord]:
    """One PairRecord per opinion with a resolvable author."""
    if isinstance(opinions, (str, Path)):
        opinions = [opinions]
    summary = summary if summary is not None else IngestSummary(DATASET)
    summary.surname_rule = "people.name_last"
    people = load_people(people_path)
    for path in opinions:
        summary.files_seen += 1
        for row in _rows(path):
            if row is MALFORMED or not isinstance(row, dict):
                summary.reject("malformed_record")
                continue
            summary.documents_seen += 1
            author_id = ""
            for col in AUTHOR_COLUMNS:
                author_id = _clean_id(row.get(col))
                if author_id:
                    break
            if not author_id:
                summary.reject("no_author")
                continue
            summary.authors_seen += 1
            person = people.get(author_id)
            if person is None:
                summary.reject("dangling_author")
                continue
            last = str(person.get("name_last") or "")
            try:
                surname = normalize_surname(last)
            except NormalizationError:
                summary.reject("missing_surname")
                continue
            raw = " ".join(str(person.get(k) or "").strip() for k in ("name_first", "name_middle", "name_last"))
            summary.emit()
            yield PairRecord(DATASET, _clean_id(row.get("id")) or f"row{summary.documents_seen}", " ".join(raw.split()), surname, _year(row))
