"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (printed in the terminal summary) before
asserting, so a failing criterion still reports what it measured.
"""
import math
import os
import random
from collections import Counter
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import ACCEPTANCE_LINES, FIXTURES
from corpus_audit.cli import main, read_census
from corpus_audit.config import load_config
from corpus_audit.estimator import (
    Estimate,
    Range,
    adjust_precision,
    census_coverage,
    expand_coverage,
    expected_pct,
    merge_stats,
    observed_range,
    pct_djn,
    temporal_expected,
    total,
    us_fraction_from_counts,
    weighted_total,
)
from corpus_audit.frame import NameFrame, load_frame
from corpus_audit.ingest import (
    IngestSummary,
    PairRecord,
    count_pairs,
    parse_arxiv,
    parse_books3,
    parse_freelaw,
    parse_github,
    parse_pubmed,
    sample_documents,
    sample_uniform,
)
from corpus_audit.pipeline import build_stats, run_estimate
from corpus_audit.report import domain_rank, load_domain_counts, to_json, top_k_overlap
from corpus_audit.sensitivity import closed_form_break_even, rdm_at

import expected_records as ex
import published_rows

TABLE1 = FIXTURES / "table1"


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append((str(criterion), "PASS" if ok else "FAIL", detail))
    assert ok, detail


def test_criterion_01_worked_example():
    authors = expand_coverage(adjust_precision(1000, 0.8), 0.1118)
    record(1, abs(authors - 7155.6) <= 0.1 and round(authors) == 7156, f"estimated group authors {authors:.4f}")


def test_criterion_02_table_rows():
    report = run_estimate(load_config(TABLE1 / "config_column1.json"))
    got = {e.scope: e for e in report.estimates}
    misses, worst = [], 0.0
    for scope, _, obs, exp, r in published_rows.ROWS:
        tol = 0.01 if scope in ("books3", "freelaw") else 0.05
        e = got[scope]
        cells = {
            "observed": ([v * 100 for v in e.observed_range], obs),
            "expected": ([v * 100 for v in e.expected_range], exp),
            "rdm": (list(e.rdm_range), r),
        }
        for col, (ours, theirs) in cells.items():
            for side, a, b in zip(("lo", "hi"), ours, theirs):
                diff = abs(a - b)
                worst = max(worst, diff)
                # 1e-9 absorbs float noise at the boundary of a tolerance
                if diff > tol + 1e-9:
                    misses.append(f"{scope}.{col}.{side} {a:.4f} vs {b} (|d|={diff:.3f} > {tol})")
    detail = "; ".join(misses) if misses else f"all 30 cells within tolerance (max |d|={worst:.3f})"
    record(2, not misses, detail)


def test_criterion_03_totals():
    t = total(published_rows.estimates())
    obs = [v * 100 for v in t.observed_range]
    r = list(t.rdm_range)
    ok = all(abs(a - b) <= 0.01 for a, b in zip(obs + r, [3.83, 5.26, 2.86, 5.25]))
    record(3, ok, f"observed {obs[0]:.3f}-{obs[1]:.3f}, RDM {r[0]:.3f}-{r[1]:.3f}")


def test_criterion_04_break_even():
    config = load_config(TABLE1 / "config_calibrated.json")
    report = run_estimate(config)
    be = {b.parameter: b for b in report.break_even}
    stats = build_stats(config, config.load_frame())
    params = config.estimation_params()
    weights = {s.dataset_id: s.weight for s in stats}
    weighted_lb = rdm_at(stats, params, weights)[1]
    checks = {
        "weighted rdm_lb 2.46": abs(weighted_lb - 2.46) < 1e-9,
        "precision 32.6±0.5pp": abs(be["precision"].break_even_value * 100 - 32.6) <= 0.5,
        "coverage 27.4±0.5pp": abs(be["coverage"].break_even_value * 100 - 27.4) <= 0.5,
        "base_rate 5.9±0.1pp": abs(be["base_rate"].break_even_value * 100 - 5.9) <= 0.1,
        "total@precision 1.17±0.01": abs(be["precision"].total_at_break_even - 1.17) <= 0.01,
        "total@base_rate 1.16±0.01": abs(be["base_rate"].total_at_break_even - 1.16) <= 0.01,
    }
    for p, b in be.items():
        cf = closed_form_break_even(stats, params, weights, p)
        checks[f"closed form {p} within 1e-6"] = abs(cf - b.break_even_value) <= 1e-6
    failed = [k for k, v in checks.items() if not v]
    detail = (
        f"precision {be['precision'].break_even_value:.4%}, coverage {be['coverage'].break_even_value:.4%}, "
        f"base_rate {be['base_rate'].break_even_value:.4%}, totals {be['precision'].total_at_break_even:.4f}/"
        f"{be['base_rate'].total_at_break_even:.4f}"
    )
    record(4, not failed, detail + (f"; failed: {failed}" if failed else ""))


def test_criterion_05_us_fraction():
    u = us_fraction_from_counts(1000, 3499) * 100
    record(5, abs(u - 28.58) <= 0.05, f"{u:.4f}%")


def _random_estimate(rng: random.Random, scope: str) -> Estimate:
    def rng_range(a, b):
        lo = rng.uniform(a, b)
        return Range(lo, lo + rng.uniform(0, b))

    return Estimate(scope, rng.uniform(0, 0.05), rng_range(0, 0.1), rng_range(0.001, 0.03), rng_range(0.1, 8))


def test_criterion_06_equal_weights():
    rng = random.Random(20240601)
    bad = 0
    for _ in range(1000):
        ests = [_random_estimate(rng, f"s{i}") for i in range(rng.randint(1, 8))]
        w = rng.choice([1.0, rng.uniform(1e-3, 1e3)])
        a, b = weighted_total(ests, {e.scope: w for e in ests}), total(ests)
        if (a.pct_djn, a.observed_range, a.expected_range, a.rdm_range) != (
            b.pct_djn, b.observed_range, b.expected_range, b.rdm_range
        ):
            bad += 1
    record(6, bad == 0, f"{1000 - bad}/1000 randomized sets identical")


def test_criterion_07_temporal_reduction():
    rng = random.Random(7)
    bad = 0
    for _ in range(1000):
        j, u = rng.uniform(0.001, 0.1), rng.uniform(0.01, 1.0)
        years = {rng.randint(1900, 2023): rng.randint(1, 10**6) for _ in range(rng.randint(1, 40))}
        rates = {y: j for y in range(1900, 2024, rng.randint(1, 10))}
        if temporal_expected(years, rates, u) != expected_pct(j, u):
            bad += 1
    record(7, bad == 0, f"{1000 - bad}/1000 constant-rate cases exact")


def test_criterion_08_oracle_equivalence():
    frame = NameFrame("t", frozenset({"KATZ", "COHEN"}), (0.8, 0.9), (0.0915, 0.1118))
    rng = random.Random(8)
    d = 0.0137
    n_match = round(10_000 * d)
    surnames = ["KATZ"] * (n_match // 2) + ["COHEN"] * (n_match - n_match // 2) + ["SMITH"] * (10_000 - n_match)
    rng.shuffle(surnames)
    recs = [PairRecord("arxiv", f"d{i // 2}", "", s, 1990 + i % 30) for i, s in enumerate(surnames)]
    brute = sum(1 for r in recs if r.surname_norm in frame.surnames)
    single = count_pairs(recs, frame)
    shard_bad = 0
    for _ in range(100):
        cuts = sorted(rng.sample(range(1, len(recs)), rng.randint(1, 20)))
        parts = [count_pairs(recs[a:b], frame) for a, b in zip([0, *cuts], [*cuts, len(recs)])]
        rng.shuffle(parts)
        merged = parts[0]
        for p in parts[1:]:
            merged = merge_stats(merged, p)
        shard_bad += merged != single or merged.matched_pairs != brute
    obs_bad = 0
    for _ in range(50):
        p, c = rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0)
        f = NameFrame("t", frame.surnames, (p, p), (c, c))
        rate = pct_djn(count_pairs(recs, f))
        obs_bad += rate != d or observed_range(rate, f) != (d * p / c, d * p / c)
    record(8, shard_bad == 0 and obs_bad == 0,
           f"shardings {100 - shard_bad}/100 equal to brute force; observed {50 - obs_bad}/50 equal d*p/c")


def test_criterion_09_commutativity():
    rng = random.Random(9)
    worst_ulps = 0.0
    exact_bad = 0
    for _ in range(1000):
        x, p, c = rng.uniform(0, 1), rng.uniform(0.01, 1), rng.uniform(0.01, 1)
        a, b = (x * p) / c, (x / c) * p
        worst_ulps = max(worst_ulps, abs(a - b) / math.ulp(max(abs(a), abs(b)) or 1.0))
        fx, fp, fc = Fraction(x), Fraction(p), Fraction(c)
        exact_bad += (fx * fp) / fc != (fx / fc) * fp
    # two correctly rounded operations each land within half an ulp of the
    # exact value, so the two orders can differ by at most 2 ulp
    record(9, worst_ulps <= 2 and exact_bad == 0,
           f"max float disagreement {worst_ulps:.0f} ulp over 1000 triples; exact rationals agree {1000 - exact_bad}/1000")


def test_criterion_10_adapters():
    f = FIXTURES
    results = {
        "pubmed": (parse_pubmed([f / "pubmed" / "articles.xml"]), ex.PUBMED),
        "books3": (parse_books3(f / "books3" / "books3.json"), ex.BOOKS3),
        "arxiv": (parse_arxiv(f / "arxiv" / "arxiv.ndjson"), ex.ARXIV),
        "github": (parse_github(f / "github" / "profiles.ndjson"), ex.GITHUB),
        "freelaw": (parse_freelaw(f / "freelaw" / "opinions.csv", f / "freelaw" / "people.csv"), ex.FREELAW),
    }
    bad = [name for name, (got, want) in results.items() if ex.multiset(got) != Counter(want)]
    s = IngestSummary("freelaw")
    list(parse_freelaw(f / "freelaw" / "opinions.csv", f / "freelaw" / "people.csv", s))
    if s.reject_reasons["no_author"] != 2:
        bad.append("freelaw authorless filter")
    g = IngestSummary("github")
    list(parse_github(f / "github" / "profiles.ndjson", g))
    if g.reject_reasons["name_pattern"] != 3:
        bad.append("github two-token filter")
    if sum(r[2] == ex.U for r in ex.BOOKS3) != 3:
        bad.append("books3 sentinel count")
    record(10, not bad, f"mismatched: {bad}" if bad else "5/5 adapters match expected multisets")


def test_criterion_11_determinism(tmp_path):
    cfg = TABLE1 / "config_calibrated.json"
    a = to_json(run_estimate(load_config(cfg)))
    b = to_json(run_estimate(load_config(cfg)))
    ja, jb = tmp_path / "a.json", tmp_path / "b.json"
    main(["estimate", str(cfg), "--json", str(ja)])
    main(["estimate", str(cfg), "--json", str(jb)])
    cli_same = ja.read_bytes() == jb.read_bytes()
    items = [f"repo/{i}" for i in range(2000)]
    recs = [PairRecord("github", f"r{i // 2}", "", "KATZ") for i in range(500)]
    identity = sample_uniform(items, 1.0, 123) == items and list(sample_documents(recs, 1.0, 5)) == recs
    seeded = sample_uniform(items, 0.05, 77) == sample_uniform(items, 0.05, 77)
    record(11, a == b and cli_same and identity and seeded,
           f"report bytes equal={a == b and cli_same}; fraction 1.0 identity={identity}; seeded repeat={seeded}")


def _env_path(name: str) -> Path | None:
    value = os.environ.get(name)
    return Path(value) if value and Path(value).exists() else None


def test_criterion_12_external_data():
    census, frame_path = _env_path("CORPUS_AUDIT_CENSUS"), _env_path("CORPUS_AUDIT_FRAME")
    c4, rw = _env_path("CORPUS_AUDIT_C4_DOMAINS"), _env_path("CORPUS_AUDIT_REFINEDWEB_DOMAINS")
    if not ((census and frame_path) or (c4 and rw)):
        ACCEPTANCE_LINES.append(("12", "SKIP", "external census/domain data not provided"))
        pytest.skip("external data absent (set CORPUS_AUDIT_CENSUS + CORPUS_AUDIT_FRAME or the domain lists)")
    parts, ok = [], True
    if census and frame_path:
        frame = load_frame(frame_path)
        rows = list(read_census(census))
        population = float(os.environ.get("CORPUS_AUDIT_POPULATION", "308745538"))
        covs = [census_coverage(rows, frame, 0.85, population, j) * 100 for j in (0.018, 0.019, 0.020, 0.021, 0.022)]
        ok &= all(9.15 <= round(c, 2) <= 11.18 for c in covs)
        parts.append("coverage " + ", ".join(f"{c:.2f}%" for c in covs))
    if c4 and rw:
        n = top_k_overlap(domain_rank(load_domain_counts(c4)), 200, domain_rank(load_domain_counts(rw)), 1000)
        ok &= n == 131
        parts.append(f"top-200/top-1000 overlap {n}")
    record(12, ok, "; ".join(parts))
