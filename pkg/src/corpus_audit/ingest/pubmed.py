"""PubMed Central (JATS XML) article metadata adapter.

Accepts single ``.xml``/``.nxml`` files (optionally gzipped), directories of
them, and ``.tar.gz`` bulk packages. Each source is parsed in isolation: a file
that fails to parse contributes no records and one ``unreadable_file`` reject.
"""
from __future__ import annotations

import gzip
import logging
import tarfile
import xml.etree.ElementTree as ET
from collections.abc import Callable, Iterable, Iterator
from pathlib import Path
from typing import IO

from corpus_audit.frame import NormalizationError, normalize_surname
from corpus_audit.ingest.names import surname_from_fullname
from corpus_audit.ingest.records import IngestSummary, PairRecord

log = logging.getLogger(__name__)

DATASET = "pubmed_central"
_XML_SUFFIXES = (".xml", ".nxml", ".xml.gz", ".nxml.gz")
_ID_PREFERENCE = ("pmc", "pmcid", "pmid", "doi", "publisher-id")


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _child(elem: ET.Element, name: str) -> ET.Element | None:
    for c in elem:
        if _local(c.tag) == name:
            return c
    return None


def _children(elem: ET.Element, name: str) -> Iterator[ET.Element]:
    return (c for c in elem if _local(c.tag) == name)


def _text(elem: ET.Element | None) -> str:
    return "".join(elem.itertext()).strip() if elem is not None else ""


def _iter_sources(paths: Iterable[str | Path]) -> Iterator[tuple[str, Callable[[], IO[bytes]]]]:
    for p in paths:
        p = Path(p)
        if p.is_dir():
            for f in sorted(p.rglob("*")):
                if f.is_file() and f.name.lower().endswith(_XML_SUFFIXES):
                    yield from _iter_sources([f])
        elif p.name.lower().endswith((".tar.gz", ".tgz", ".tar")):
            yield from _iter_tar(p)
        elif p.name.lower().endswith(".gz"):
            yield str(p), (lambda p=p: gzip.open(p, "rb"))
        else:
            yield str(p), (lambda p=p: open(p, "rb"))


def _iter_tar(path: Path) -> Iterator[tuple[str, Callable[[], IO[bytes]]]]:
    try:
        tar = tarfile.open(path)
    except (OSError, tarfile.TarError):
        yield str(path), _failing_opener(path)
        return
    with tar:
        for member in tar:
            if member.isfile() and member.name.lower().endswith(_XML_SUFFIXES):
                data = tar.extractfile(member)
                if data is None:
                    continue
                yield f"{path}:{member.name}", (lambda data=data: data)


def _failing_opener(path: Path) -> Callable[[], IO[bytes]]:
    def opener() -> IO[bytes]:
        raise OSError(f"unreadable archive {path}")

    return opener


def _article_meta(article: ET.Element) -> ET.Element | None:
    front = _child(article, "front")
    return _child(front, "article-meta") if front is not None else None


def _document_id(meta: ET.Element, fallback: str) -> str:
    ids = {}
    for aid in _children(meta, "article-id"):
        kind = aid.get("pub-id-type", "")
        ids.setdefault(kind, _text(aid))
    for kind in _ID_PREFERENCE:
        if ids.get(kind):
            value = ids[kind]
            if kind == "pmc" and not value.upper().startswith("PMC"):
                value = "PMC" + value
            return value
    return fallback


def _year(meta: ET.Element) -> int | None:
    years = []
    for pd in _children(meta, "pub-date"):
        y = _text(_child(pd, "year"))
        if y.isdigit():
            years.append(int(y))
    return min(years) if years else None


def _contrib_surname(contrib: ET.Element) -> tuple[str | None, str, str]:
    """Returns (surname, raw author string, reject reason if surname is None)."""
    name = _child(contrib, "name")
    if name is None:
        alts = _child(contrib, "name-alternatives")
        if alts is not None:
            name = _child(alts, "name")
    if name is not None:
        surname = _text(_child(name, "surname"))
        given = _text(_child(name, "given-names"))
        raw = f"{given} {surname}".strip()
        if not surname:
            return None, raw, "missing_surname"
        try:
            return normalize_surname(surname), raw, ""
        except NormalizationError:
            return None, raw, "missing_surname"
    string_name = _child(contrib, "string-name")
    if string_name is not None:
        raw = _text(string_name)
        surname, _ = surname_from_fullname(raw)
        return surname, raw, "" if surname else "malformed_author"
    if _child(contrib, "collab") is not None:
        return None, _text(_child(contrib, "collab")), "group_author"
    return None, "", "malformed_author"


def _parse_article(article: ET.Element, fallback_id: str, summary: IngestSummary) -> list[PairRecord]:
    summary.documents_seen += 1
    meta = _article_meta(article)
    if meta is None:
        summary.reject("malformed_record")
        return []
    doc_id = _document_id(meta, fallback_id)
    year = _year(meta)
    out = []
    for group in _children(meta, "contrib-group"):
        for contrib in _children(group, "contrib"):
            if contrib.get("contrib-type", "author") != "author":
                continue
            summary.authors_seen += 1
            surname, raw, reason = _contrib_surname(contrib)
            if surname is None:
                summary.reject(reason)
                continue
            out.append(PairRecord(DATASET, doc_id, raw, surname, year))
            summary.emit()
    return out


def _parse_source(name: str, opener: Callable[[], IO[bytes]]) -> tuple[list[PairRecord], IngestSummary]:
    local = IngestSummary(DATASET, files_seen=1, surname_rule="structured surname field")
    records: list[PairRecord] = []
    index = 0
    with opener() as fh:
        for _event, elem in ET.iterparse(fh, events=("end",)):
            if _local(elem.tag) == "article":
                records.extend(_parse_article(elem, f"{Path(name).name}#{index}", local))
                index += 1
                elem.clear()
    return records, local


def parse_pubmed_file(name: str, opener: Callable[[], IO[bytes]]) -> tuple[list[PairRecord], IngestSummary]:
    """Parse one source; a parse failure yields no records and one reject."""
    try:
        return _parse_source(name, opener)
    except (ET.ParseError, OSError, EOFError, UnicodeDecodeError) as exc:
        log.warning("skipping unreadable file %s: %s", name, exc)
        failed = IngestSummary(DATASET, files_seen=1, surname_rule="structured surname field")
        failed.reject("unreadable_file")
        return [], failed


def parse_pubmed(paths: Iterable[str | Path], summary: IngestSummary | None = None) -> Iterator[PairRecord]:
    """One PairRecord per (article x author) across all given sources."""
    summary = summary if summary is not None else IngestSummary(DATASET)
    summary.surname_rule = "structured surname field"
    for name, opener in _iter_sources(paths):
        records, local = parse_pubmed_file(name, opener)
        summary.absorb(local)
        yield from records
