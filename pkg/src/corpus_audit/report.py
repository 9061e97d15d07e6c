"""Audit reports: text table, lossless JSON/CSV export, and domain ranking.

Reports are aggregate-only. Frame members appear only when a run opts into
unsafe debug mode, and such output is watermarked.
"""
from __future__ import annotations

import csv
import io
import json
import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple

from corpus_audit.errors import ConfigError, ContractViolation
from corpus_audit.estimator import Estimate, Range
from corpus_audit.frame import NameFrame
from corpus_audit.sensitivity import BreakEvenResult

SCHEMA_VERSION = 1
UNSAFE_WATERMARK = "UNSAFE-DEBUG OUTPUT: contains frame members; do not distribute"

DISPLAY_NAMES = {
    "pubmed_central": "PubMed Central",
    "books3": "Books3",
    "arxiv": "ArXiv",
    "github": "GitHub",
    "freelaw": "FreeLaw",
    "total": "Total",
    "weighted_total": "Weighted Total",
}
TABLE_HEADER = ("Dataset", "%DJN", "Observed %", "Expected %", "RDM")
CSV_FIELDS = (
    "scope",
    "pct_djn",
    "observed_lo",
    "observed_hi",
    "expected_lo",
    "expected_hi",
    "rdm_lo",
    "rdm_hi",
    "config_digest",
)


@dataclass
class AuditReport:
    metadata: dict[str, Any]
    estimates: list[Estimate] = field(default_factory=list)
    total: Estimate | None = None
    weighted_total: Estimate | None = None
    break_even: list[BreakEvenResult] = field(default_factory=list)
    ingest_summaries: list[dict[str, Any]] = field(default_factory=list)
    stats: list[dict[str, Any]] = field(default_factory=list)
    parameters: dict[str, Any] = field(default_factory=dict)
    debug: dict[str, Any] | None = None

    def rows(self) -> list[Estimate]:
        return self.estimates + [e for e in (self.total, self.weighted_total) if e is not None]

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "metadata": self.metadata,
            "estimates": [estimate_to_dict(e) for e in self.estimates],
            "total": estimate_to_dict(self.total) if self.total else None,
            "weighted_total": estimate_to_dict(self.weighted_total) if self.weighted_total else None,
            "break_even": [b.to_dict() for b in self.break_even],
            "ingest_summaries": self.ingest_summaries,
            "stats": self.stats,
            "parameters": self.parameters,
            "debug": self.debug,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> AuditReport:
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported report schema version {d.get('schema_version')!r}")
        return cls(
            metadata=d["metadata"],
            estimates=[estimate_from_dict(e) for e in d.get("estimates", [])],
            total=estimate_from_dict(d["total"]) if d.get("total") else None,
            weighted_total=estimate_from_dict(d["weighted_total"]) if d.get("weighted_total") else None,
            break_even=[BreakEvenResult.from_dict(b) for b in d.get("break_even", [])],
            ingest_summaries=d.get("ingest_summaries", []),
            stats=d.get("stats", []),
            parameters=d.get("parameters", {}),
            debug=d.get("debug"),
        )


def estimate_to_dict(e: Estimate) -> dict[str, Any]:
    return {
        "scope": e.scope,
        "pct_djn": e.pct_djn,
        "observed_range": list(e.observed_range),
        "expected_range": list(e.expected_range),
        "rdm_range": list(e.rdm_range),
    }


def estimate_from_dict(d: dict[str, Any]) -> Estimate:
    return Estimate(
        scope=d["scope"],
        pct_djn=d["pct_djn"],
        observed_range=Range(*d["observed_range"]),
        expected_range=Range(*d["expected_range"]),
        rdm_range=Range(*d["rdm_range"]),
    )


def _num(x: float) -> str:
    text = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def _span(r: Range, scale: float = 1.0) -> str:
    return f"{_num(r.lo * scale)}-{_num(r.hi * scale)}"


def format_row(e: Estimate) -> str:
    """``%DJN | observed | expected | RDM``; percents and ratios to 2 decimals."""
    return " | ".join(
        (_num(e.pct_djn * 100), _span(e.observed_range, 100), _span(e.expected_range, 100), _span(e.rdm_range))
    )


def render_table(report: AuditReport) -> str:
    lines = []
    if report.debug is not None:
        lines.append(UNSAFE_WATERMARK)
    lines.append(" | ".join(TABLE_HEADER))
    for e in report.rows():
        lines.append(f"{DISPLAY_NAMES.get(e.scope, e.scope)} | {format_row(e)}")
    return "\n".join(lines) + "\n"


def render_break_even(results: Sequence[BreakEvenResult]) -> str:
    lines = []
    for b in results:
        lines.append(
            f"break-even {b.parameter}: {_num(b.break_even_value * 100)}% "
            f"(weighted RDM {_num(b.weighted_total_at_break_even)}, total RDM {_num(b.total_at_break_even)})"
        )
    return "\n".join(lines) + ("\n" if lines else "")


def to_json(report: AuditReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def to_csv(report: AuditReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    digest = report.metadata.get("config_digest", "")
    for e in report.rows():
        writer.writerow(
            [
                e.scope,
                repr(e.pct_djn),
                *(repr(v) for v in e.observed_range),
                *(repr(v) for v in e.expected_range),
                *(repr(v) for v in e.rdm_range),
                digest,
            ]
        )
    return buf.getvalue()


def export(report: AuditReport, path: str | Path, fmt: str = "json") -> Path:
    """Write a full-precision export. JSON round-trips through :func:`load_report`."""
    path = Path(path)
    if fmt == "json":
        text = to_json(report)
    elif fmt == "csv":
        text = to_csv(report)
    else:
        raise ContractViolation(f"unknown export format {fmt!r}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def load_report(path: str | Path) -> AuditReport:
    try:
        return AuditReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: not a readable report: {exc}") from exc


def privacy_scan(text: str, frame: NameFrame) -> list[str]:
    """Frame surnames that occur as whole words in ``text`` (case-insensitive)."""
    upper = text.upper()
    hits = []
    for name in sorted(frame.surnames):
        if re.search(rf"(?<!\w){re.escape(name)}(?!\w)", upper):
            hits.append(name)
    return hits


class DomainCount(NamedTuple):
    domain: str
    word_count: int


def domain_rank(counts: Iterable[DomainCount | tuple[str, int]]) -> list[DomainCount]:
    """Domains by descending word count; ties broken by domain name.

    Repeated domains (e.g. from several sample shards) are summed first. Domain
    strings are used exactly as given, so subdomains are not folded.
    """
    totals: Counter = Counter()
    for domain, words in counts:
        if words < 0:
            raise ContractViolation(f"negative word count for {domain!r}")
        totals[domain] += words
    return [DomainCount(d, n) for d, n in sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))]


def _domains(ranked: Sequence[DomainCount | str]) -> list[str]:
    return [r.domain if isinstance(r, DomainCount) else r for r in ranked]


def top_k_overlap(list_a: Sequence[DomainCount | str], k_a: int, list_b: Sequence[DomainCount | str], k_b: int) -> int:
    """Size of the intersection of the top ``k_a`` of A and the top ``k_b`` of B."""
    if k_a < 0 or k_b < 0:
        raise ContractViolation("k must be non-negative")
    if k_a > len(list_a) or k_b > len(list_b):
        raise ContractViolation(f"k exceeds list length ({k_a}/{len(list_a)}, {k_b}/{len(list_b)})")
    return len(set(_domains(list_a)[:k_a]) & set(_domains(list_b)[:k_b]))


def load_domain_counts(path: str | Path) -> list[DomainCount]:
    """CSV with ``domain`` and ``word_count`` columns."""
    out = []
    with open(path, encoding="utf-8", newline="") as f:
        for i, row in enumerate(csv.DictReader(f), 2):
            try:
                out.append(DomainCount(row["domain"].strip(), int(row["word_count"])))
            except (KeyError, ValueError, AttributeError) as exc:
                raise ConfigError(f"{path}:{i}: bad domain row: {exc}") from exc
    return out
