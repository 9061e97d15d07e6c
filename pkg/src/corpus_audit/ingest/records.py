"""Pair records, ingest summaries, NDJSON interchange, and pair counting."""
from __future__ import annotations

import json
from collections import Counter
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from corpus_audit.errors import ConfigError, ContractViolation, RejectBudgetExceeded
from corpus_audit.estimator import DATASETS, DatasetStats
from corpus_audit.frame import UNPARSEABLE, NameFrame, match_surname, normalize_surname

# Reject reasons that indicate broken input. Everything else is a deliberate
# filter (unnamed GitHub profiles, authorless opinions) and does not count
# against the reject budget.
MALFORMED_REASONS = frozenset(
    {"unreadable_file", "malformed_record", "malformed_author", "missing_surname", "dangling_author"}
)

DEFAULT_REJECT_BUDGET = 0.05


@dataclass(frozen=True, slots=True)
class PairRecord:
    dataset_id: str
    document_id: str
    author_raw: str
    surname_norm: str
    year: int | None = None
    country_hint: str | None = None

    def __post_init__(self) -> None:
        if self.dataset_id not in DATASETS:
            raise ContractViolation(f"unknown dataset_id {self.dataset_id!r}")
        if self.surname_norm != UNPARSEABLE and normalize_surname(self.surname_norm) != self.surname_norm:
            raise ContractViolation(f"surname_norm is not normalized: {self.surname_norm!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "dataset_id": self.dataset_id,
            "document_id": self.document_id,
            "author_raw": self.author_raw,
            "surname_norm": self.surname_norm,
            "year": self.year,
            "country_hint": self.country_hint,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> PairRecord:
        return cls(
            dataset_id=d["dataset_id"],
            document_id=str(d["document_id"]),
            author_raw=d.get("author_raw", ""),
            surname_norm=d["surname_norm"],
            year=d.get("year"),
            country_hint=d.get("country_hint"),
        )


@dataclass
class IngestSummary:
    dataset_id: str
    records_emitted: int = 0
    documents_seen: int = 0
    records_rejected: int = 0
    reject_reasons: Counter = field(default_factory=Counter)
    files_seen: int = 0
    authors_seen: int = 0
    surname_rule: str = ""
    rule_hits: Counter = field(default_factory=Counter)

    def reject(self, reason: str, n: int = 1) -> None:
        self.records_rejected += n
        self.reject_reasons[reason] += n

    def emit(self, n: int = 1) -> None:
        self.records_emitted += n

    @property
    def malformed(self) -> int:
        return sum(n for r, n in self.reject_reasons.items() if r in MALFORMED_REASONS)

    @property
    def malformed_fraction(self) -> float:
        seen = self.records_emitted + self.records_rejected
        return self.malformed / seen if seen else 0.0

    def merge(self, other: IngestSummary) -> IngestSummary:
        if other.dataset_id != self.dataset_id:
            raise ContractViolation(f"cannot merge summaries for {self.dataset_id} and {other.dataset_id}")
        return IngestSummary(
            dataset_id=self.dataset_id,
            records_emitted=self.records_emitted + other.records_emitted,
            documents_seen=self.documents_seen + other.documents_seen,
            records_rejected=self.records_rejected + other.records_rejected,
            reject_reasons=self.reject_reasons + other.reject_reasons,
            files_seen=self.files_seen + other.files_seen,
            authors_seen=self.authors_seen + other.authors_seen,
            surname_rule=self.surname_rule or other.surname_rule,
            rule_hits=self.rule_hits + other.rule_hits,
        )

    def absorb(self, other: IngestSummary) -> None:
        """In-place :meth:`merge`."""
        merged = self.merge(other)
        for k, v in vars(merged).items():
            setattr(self, k, v)

    def to_dict(self) -> dict[str, Any]:
        return {
            "dataset_id": self.dataset_id,
            "records_emitted": self.records_emitted,
            "documents_seen": self.documents_seen,
            "records_rejected": self.records_rejected,
            "reject_reasons": dict(sorted(self.reject_reasons.items())),
            "files_seen": self.files_seen,
            "authors_seen": self.authors_seen,
            "surname_rule": self.surname_rule,
            "rule_hits": dict(sorted(self.rule_hits.items())),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> IngestSummary:
        return cls(
            dataset_id=d["dataset_id"],
            records_emitted=d.get("records_emitted", 0),
            documents_seen=d.get("documents_seen", 0),
            records_rejected=d.get("records_rejected", 0),
            reject_reasons=Counter(d.get("reject_reasons", {})),
            files_seen=d.get("files_seen", 0),
            authors_seen=d.get("authors_seen", 0),
            surname_rule=d.get("surname_rule", ""),
            rule_hits=Counter(d.get("rule_hits", {})),
        )


def enforce_reject_budget(summary: IngestSummary, max_fraction: float = DEFAULT_REJECT_BUDGET) -> None:
    if summary.malformed_fraction > max_fraction:
        raise RejectBudgetExceeded(
            f"{summary.dataset_id}: {summary.malformed} malformed inputs "
            f"({summary.malformed_fraction:.2%}) exceed the {max_fraction:.2%} budget"
        )


def _dumps(d: dict[str, Any]) -> str:
    return json.dumps(d, ensure_ascii=False, separators=(",", ":"), allow_nan=False)


def write_pairs(records: Iterable[PairRecord], path: str | Path) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(_dumps(rec.to_dict()))
            f.write("\n")
            n += 1
    return n


def read_pairs(path: str | Path) -> Iterator[PairRecord]:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield PairRecord.from_dict(json.loads(line))
            except (json.JSONDecodeError, KeyError, TypeError, ContractViolation) as exc:
                raise ConfigError(f"{path}:{lineno}: bad pair record: {exc}") from exc


def write_summary(summary: IngestSummary, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def count_pairs(
    records: Iterable[PairRecord],
    frame: NameFrame,
    weight: float = 1.0,
    dataset_id: str | None = None,
) -> DatasetStats:
    """Count total and frame-matched pairs for a single dataset.

    ``dataset_id`` labels an empty stream; when given, every record must carry it.
    """
    total = matched = 0
    years: Counter = Counter()
    for rec in records:
        if dataset_id is None:
            dataset_id = rec.dataset_id
        elif rec.dataset_id != dataset_id:
            raise ContractViolation(f"mixed datasets in one count: {dataset_id!r} and {rec.dataset_id!r}")
        total += 1
        if match_surname(frame, rec.surname_norm):
            matched += 1
        if rec.year is not None:
            years[rec.year] += 1
    return DatasetStats(
        dataset_id=dataset_id or "",
        total_pairs=total,
        matched_pairs=matched,
        weight=weight,
        year_histogram=dict(sorted(years.items())),
    )
