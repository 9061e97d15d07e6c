import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus_audit.errors import ContractViolation
from corpus_audit.estimator import DatasetStats, merge_stats, observed_range, pct_djn
from corpus_audit.frame import NameFrame
from corpus_audit.ingest import PairRecord, count_pairs, sample_documents, sample_uniform
from corpus_audit.ingest.sampling import binomial_band, unique_in_order


def test_sample_is_deterministic():
    items = list(range(5000))
    assert sample_uniform(items, 0.1, 42) == sample_uniform(items, 0.1, 42)
    assert sample_uniform(items, 0.1, 42) != sample_uniform(items, 0.1, 43)


def test_sample_fraction_one_is_identity():
    items = [f"repo/{i}" for i in range(1000)]
    assert sample_uniform(items, 1.0, 3) == items


@pytest.mark.parametrize("fraction", [0.0, -0.1, 1.5])
def test_sample_fraction_domain(fraction):
    with pytest.raises(ContractViolation):
        sample_uniform([1], fraction, 0)


@pytest.mark.parametrize("seed", [0, 1, 2024])
def test_sample_size_within_binomial_band(seed):
    n = 199_600
    kept = len(sample_uniform(range(n), 0.05, seed))
    lo, hi = binomial_band(n, 0.05)
    assert lo <= kept <= hi
    assert 9_980 - 4 * (n * 0.05 * 0.95) ** 0.5 <= kept <= 9_980 + 4 * (n * 0.05 * 0.95) ** 0.5


def test_document_sampling_matches_uniform_over_ids():
    recs = [PairRecord("github", f"r{i}", "", "KATZ") for i in range(300) for _ in range(i % 3 + 1)]
    kept = list(sample_documents(recs, 0.3, 11))
    ids = unique_in_order([r.document_id for r in recs])
    assert unique_in_order([r.document_id for r in kept]) == sample_uniform(ids, 0.3, 11)
    # whole documents are kept or dropped
    sizes = Counter(r.document_id for r in recs)
    assert all(n == sizes[d] for d, n in Counter(r.document_id for r in kept).items())
    assert list(sample_documents(recs, 1.0, 5)) == recs


def _synthetic(n, rate, seed):
    rng = random.Random(seed)
    names = ["KATZ", "COHEN", "SMITH", "JONES", "LEE"]
    recs = []
    for i in range(n):
        hit = rng.random() < rate
        surname = rng.choice(names[:2]) if hit else rng.choice(names[2:])
        recs.append(PairRecord("arxiv", f"d{i // 3}", "", surname, 2000 + i % 20))
    return recs


def test_sharded_count_equals_single_pass(frame):
    recs = _synthetic(10_000, 0.02, 1)
    whole = count_pairs(recs, frame)
    brute = sum(r.surname_norm in {"KATZ", "COHEN"} for r in recs)
    assert whole.matched_pairs == brute and whole.total_pairs == 10_000
    rng = random.Random(99)
    for _ in range(100):
        cuts = sorted(rng.sample(range(1, len(recs)), rng.randint(1, 12)))
        shards = [recs[a:b] for a, b in zip([0, *cuts], [*cuts, len(recs)])]
        parts = [count_pairs(s, frame) for s in shards]
        rng.shuffle(parts)
        merged = parts[0]
        for p in parts[1:]:
            merged = merge_stats(merged, p)
        assert merged == whole


def test_observed_equals_planted_rate_analytically():
    n, matched = 10_000, 250
    recs = [PairRecord("books3", str(i), "", "KATZ" if i < matched else "SMITH") for i in range(n)]
    rng = random.Random(5)
    for _ in range(50):
        p, c = rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0)
        f = NameFrame("t", frozenset({"KATZ"}), (p, p), (c, c))
        d = pct_djn(count_pairs(recs, f))
        assert d == matched / n
        assert observed_range(d, f) == (d * p / c, d * p / c)


@given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), min_size=3, max_size=3))
def test_merge_stats_property(pairs):
    stats = [DatasetStats("freelaw", a + b, a, 1.0, {1990: a + b}) for a, b in pairs]
    x, y, z = stats
    assert merge_stats(merge_stats(x, y), z) == merge_stats(x, merge_stats(y, z))
    assert merge_stats(x, y) == merge_stats(y, x)


def test_year_histogram_counted(frame):
    recs = [PairRecord("arxiv", "1", "", "KATZ", 2001), PairRecord("arxiv", "2", "", "LEE", 2001),
            PairRecord("arxiv", "3", "", "LEE")]
    s = count_pairs(recs, frame)
    assert dict(s.year_histogram) == {2001: 2}
