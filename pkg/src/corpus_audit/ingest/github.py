"""GitHub contributor-profile adapter.

Only profiles whose free-text name is exactly ``<First Name> <Last Name>``
are kept; everything else is filtered out (not a denominator record).
"""
from __future__ import annotations

import re
from collections.abc import Iterable, Iterator
from pathlib import Path

from corpus_audit.frame import NormalizationError, normalize_surname
from corpus_audit.ingest._jsonio import MALFORMED, iter_json_entries
from corpus_audit.ingest.records import IngestSummary, PairRecord

DATASET = "github"

_WORD = r"[^\W\d_](?:[^\W\d_]|['’.\-])*"
TWO_TOKEN_NAME = re.compile(rf"^\s*({_WORD})\s+({_WORD})\s*$")


def two_token_surname(name: str | None) -> str | None:
    """Surname from a ``First Last`` profile name, or None if the pattern fails."""
    if not isinstance(name, str):
        return None
    m = TWO_TOKEN_NAME.match(name)
    if not m:
        return None
    try:
        return normalize_surname(m.group(2))
    except NormalizationError:
        return None


def parse_github(
    paths: Iterable[str | Path] | str | Path, summary: IngestSummary | None = None
) -> Iterator[PairRecord]:
    """One PairRecord per (repository x named contributor).

    Input records carry ``repo`` and ``name`` (plus optional ``login``), as
    written by :mod:`corpus_audit.ingest.github_client`.
    """
    if isinstance(paths, (str, Path)):
        paths = [paths]
    summary = summary if summary is not None else IngestSummary(DATASET)
    summary.surname_rule = "two-token name, second token"
    last_repo = None
    for path in paths:
        summary.files_seen += 1
        for entry in iter_json_entries(path):
            if entry is MALFORMED or not isinstance(entry, dict) or not entry.get("repo"):
                summary.reject("malformed_record")
                continue
            repo = str(entry["repo"])
            if repo != last_repo:
                summary.documents_seen += 1
                last_repo = repo
            if "login" in entry and entry["login"] is None:
                # repository with no human contributors
                continue
            summary.authors_seen += 1
            name = entry.get("name")
            if not isinstance(name, str) or not name.strip():
                summary.reject("name_missing")
                continue
            surname = two_token_surname(name)
            if surname is None:
                summary.reject("name_pattern")
                continue
            summary.emit()
            yield PairRecord(DATASET, repo, name.strip(), surname)
