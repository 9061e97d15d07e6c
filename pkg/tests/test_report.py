import csv
import io
import json
import random
import string

import pytest

from corpus_audit.config import load_config
from corpus_audit.errors import ConfigError, ContractViolation
from corpus_audit.estimator import DatasetStats, EstimationParams, estimate_dataset, total
from corpus_audit.pipeline import run_estimate
from corpus_audit.report import (
    TABLE_HEADER,
    UNSAFE_WATERMARK,
    AuditReport,
    DomainCount,
    domain_rank,
    export,
    format_row,
    load_report,
    privacy_scan,
    render_table,
    to_csv,
    to_json,
    top_k_overlap,
)

import published_rows


def test_books3_row(frame):
    params = EstimationParams(frame, (0.018, 0.024), {"books3": 1.0})
    e = estimate_dataset(DatasetStats("books3", 10_000, 98), params)
    assert format_row(e) == "0.98 | 7.01-9.64 | 1.8-2.4 | 2.92-5.36"


def test_total_row_from_published_rows():
    assert format_row(total(published_rows.estimates())).endswith("| 2.86-5.25")


def test_empty_report_is_header_only():
    assert render_table(AuditReport(metadata={})) == " | ".join(TABLE_HEADER) + "\n"


def test_table_has_total_rows(fixtures):
    report = run_estimate(load_config(fixtures / "table1" / "config_calibrated.json"))
    lines = render_table(report).splitlines()
    assert lines[0] == "Dataset | %DJN | Observed % | Expected % | RDM"
    assert [ln.split(" | ")[0] for ln in lines[1:]] == [
        "PubMed Central", "Books3", "ArXiv", "GitHub", "FreeLaw", "Total", "Weighted Total"]
    assert lines[-1] == "Weighted Total | 0.37 | 2.63-3.62 | 0.77-1.03 | 2.46-4.51"


def test_json_round_trip_bit_identical(fixtures, tmp_path):
    report = run_estimate(load_config(fixtures / "table1" / "config_calibrated.json"))
    path = export(report, tmp_path / "r.json", "json")
    back = load_report(path)
    assert back.rows() == report.rows()
    assert back.break_even == report.break_even
    assert to_json(back) == to_json(report)


def test_csv_is_full_precision(fixtures):
    report = run_estimate(load_config(fixtures / "table1" / "config_column1.json"))
    rows = list(csv.DictReader(io.StringIO(to_csv(report))))
    assert [r["scope"] for r in rows] == [e.scope for e in report.rows()]
    for row, e in zip(rows, report.rows()):
        assert float(row["rdm_lo"]) == e.rdm_range.lo
        assert float(row["observed_hi"]) == e.observed_range.hi
        assert row["config_digest"] == report.metadata["config_digest"]


def test_export_rejects_unknown_format(tmp_path):
    with pytest.raises(ContractViolation):
        export(AuditReport(metadata={}), tmp_path / "x", "xml")


def test_load_report_errors(tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"schema_version": 99}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_report(p)
    p.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_report(p)


def test_default_outputs_have_no_frame_members(fixtures, frame):
    config = load_config(fixtures / "table1" / "config_calibrated.json")
    report = run_estimate(config)
    f = config.load_frame()
    for text in (to_json(report), to_csv(report), render_table(report)):
        assert privacy_scan(text, f) == []


def test_unsafe_debug_is_watermarked(fixtures):
    config = load_config(fixtures / "table1" / "config_column1.json", unsafe_debug=True)
    report = run_estimate(config)
    text = render_table(report)
    assert text.startswith(UNSAFE_WATERMARK)
    assert privacy_scan(to_json(report), config.load_frame()) != []


def test_privacy_scan_whole_words(frame):
    assert privacy_scan("the katz report", frame) == ["KATZ"]
    assert privacy_scan("katzenjammer levying", frame) == []


def test_domain_rank_examples():
    assert [d.domain for d in domain_rank([("a", 5), ("b", 9)])] == ["b", "a"]
    assert [d.domain for d in domain_rank([("b", 5), ("a", 5)])] == ["a", "b"]
    assert domain_rank([("a", 2), ("a", 3)]) == [DomainCount("a", 5)]
    # subdomains are kept as given
    assert len(domain_rank([("patents.google.com", 1), ("google.com", 1)])) == 2
    with pytest.raises(ContractViolation):
        domain_rank([("a", -1)])


def test_domain_rank_matches_brute_force():
    rng = random.Random(3)
    doms = {"".join(rng.choices(string.ascii_lowercase, k=6)) + ".com": rng.randint(0, 50) for _ in range(1000)}
    ranked = domain_rank(doms.items())
    # brute force: repeatedly take the max by (count, then smallest name)
    remaining = dict(doms)
    oracle = []
    while remaining:
        best = None
        for d, n in remaining.items():
            if best is None or n > remaining[best] or (n == remaining[best] and d < best):
                best = d
        oracle.append(best)
        del remaining[best]
    assert [d.domain for d in ranked] == oracle


def test_top_k_overlap():
    a = [f"d{i}" for i in range(20)]
    assert top_k_overlap(a, 10, a, 10) == 10
    assert top_k_overlap(a, 10, [f"x{i}" for i in range(20)], 10) == 0
    assert top_k_overlap(a, 5, list(reversed(a)), 17) == 2
    with pytest.raises(ContractViolation):
        top_k_overlap(a, 21, a, 1)
