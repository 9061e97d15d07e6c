"""Bounded estimation of a group's share of (document x author) pairs.

All quantities are fractions in [0, 1] (a "percent" column of 0.98 is stored as
0.0098); only the report layer multiplies by 100 and rounds.

The lower bound pairs low precision with high coverage and the high base rate;
the upper bound uses the opposite ends. Ratios are paired conservatively:
``rdm_lo = observed_lo / expected_hi`` and ``rdm_hi = observed_hi / expected_lo``.
"""
from __future__ import annotations

import unicodedata
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from corpus_audit.errors import ContractViolation
from corpus_audit.frame import NameFrame, NormalizationError, match_surname, normalize_surname

DATASETS = ("pubmed_central", "books3", "arxiv", "github", "freelaw")
AGGREGATE_SCOPES = ("total", "weighted_total")

# The dataset's geographic mix is unknown, so every book is treated as US-published.
DEFAULT_US_FRACTION = {"books3": 1.0}


class Range(NamedTuple):
    lo: float
    hi: float


@dataclass(frozen=True)
class DatasetStats:
    dataset_id: str
    total_pairs: int
    matched_pairs: int
    weight: float = 1.0
    year_histogram: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0 <= self.matched_pairs <= self.total_pairs:
            raise ContractViolation(
                f"{self.dataset_id}: need 0 <= matched ({self.matched_pairs}) <= total ({self.total_pairs})"
            )
        if not self.weight > 0:
            raise ContractViolation(f"{self.dataset_id}: weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class EstimationParams:
    frame: NameFrame
    base_rate_range: tuple[float, float]
    us_fraction: Mapping[str, float]

    def __post_init__(self) -> None:
        lo, hi = self.base_rate_range
        if not 0.0 < lo <= hi < 1.0:
            raise ContractViolation(f"base_rate_range must satisfy 0 < lb <= ub < 1, got {[lo, hi]}")
        for ds, u in self.us_fraction.items():
            if not 0.0 < u <= 1.0:
                raise ContractViolation(f"us_fraction[{ds}] must be in (0, 1], got {u}")

    def us_fraction_for(self, dataset_id: str) -> float:
        if dataset_id in self.us_fraction:
            return self.us_fraction[dataset_id]
        if dataset_id in DEFAULT_US_FRACTION:
            return DEFAULT_US_FRACTION[dataset_id]
        raise ContractViolation(f"no us_fraction configured for dataset {dataset_id!r}")


@dataclass(frozen=True)
class Estimate:
    scope: str
    pct_djn: float
    observed_range: Range
    expected_range: Range
    rdm_range: Range

    def __post_init__(self) -> None:
        for name in ("observed_range", "expected_range", "rdm_range"):
            rng = getattr(self, name)
            if rng.lo > rng.hi:
                raise ContractViolation(f"{self.scope}: {name} is inverted: {tuple(rng)}")


def pct_djn(stats: DatasetStats) -> float:
    """Share of pairs whose surname is in the frame."""
    if stats.total_pairs <= 0:
        raise ContractViolation(f"{stats.dataset_id}: no pairs, match rate is undefined")
    return stats.matched_pairs / stats.total_pairs


def adjust_precision(pct: float, p: float) -> float:
    """Discount frame matches who are not group members."""
    if not 0.0 < p <= 1.0:
        raise ContractViolation(f"precision must be in (0, 1], got {p}")
    return pct * p


def expand_coverage(pct: float, c: float) -> float:
    """Scale up to group members who do not carry a frame surname."""
    if not 0.0 < c <= 1.0:
        raise ContractViolation(f"coverage must be in (0, 1], got {c}")
    return pct / c


def observed_range(pct: float, frame: NameFrame) -> Range:
    p_lo, p_hi = frame.precision_range
    c_lo, c_hi = frame.coverage_range
    return Range(
        expand_coverage(adjust_precision(pct, p_lo), c_hi),
        expand_coverage(adjust_precision(pct, p_hi), c_lo),
    )


def expected_pct(base_rate: float, u: float) -> float:
    if not (0.0 < base_rate <= 1.0 and 0.0 < u <= 1.0):
        raise ContractViolation(f"base rate and US fraction must be in (0, 1], got {base_rate}, {u}")
    return base_rate * u


def expected_range(base_rate_range: tuple[float, float], u: float) -> Range:
    return Range(expected_pct(base_rate_range[0], u), expected_pct(base_rate_range[1], u))


def rdm(observed: Range, expected: Range) -> Range:
    """Relative dispossession magnitude: observed share over expected share."""
    if expected.lo <= 0 or expected.hi <= 0:
        raise ContractViolation(f"expected share must be positive, got {tuple(expected)}")
    return Range(observed.lo / expected.hi, observed.hi / expected.lo)


def estimate_dataset(stats: DatasetStats, params: EstimationParams) -> Estimate:
    d = pct_djn(stats)
    obs = observed_range(d, params.frame)
    exp = expected_range(params.base_rate_range, params.us_fraction_for(stats.dataset_id))
    return Estimate(stats.dataset_id, d, obs, exp, rdm(obs, exp))


def _exact_mean(values: Sequence[float], weights: Sequence[float]) -> float:
    # rational arithmetic, rounded once: equal weights give exactly the plain mean
    num = sum((Fraction(w) * Fraction(v) for v, w in zip(values, weights)), Fraction(0))
    return float(num / sum((Fraction(w) for w in weights), Fraction(0)))


def _combine(scope: str, estimates: Sequence[Estimate], weights: Sequence[float]) -> Estimate:
    def col(get) -> float:
        return _exact_mean([get(e) for e in estimates], weights)

    return Estimate(
        scope=scope,
        pct_djn=col(lambda e: e.pct_djn),
        observed_range=Range(col(lambda e: e.observed_range.lo), col(lambda e: e.observed_range.hi)),
        expected_range=Range(col(lambda e: e.expected_range.lo), col(lambda e: e.expected_range.hi)),
        rdm_range=Range(col(lambda e: e.rdm_range.lo), col(lambda e: e.rdm_range.hi)),
    )


def total(estimates: Sequence[Estimate]) -> Estimate:
    """Equal-weight mean of every column, RDM bounds included.

    The RDM of the total is the mean of per-dataset RDMs, not the ratio of
    mean observed to mean expected.
    """
    if not estimates:
        raise ContractViolation("total() needs at least one estimate")
    return _combine("total", estimates, [1.0] * len(estimates))


def weighted_total(estimates: Sequence[Estimate], weights: Mapping[str, float]) -> Estimate:
    if not estimates:
        raise ContractViolation("weighted_total() needs at least one estimate")
    ws = []
    for e in estimates:
        w = weights.get(e.scope)
        if w is None:
            raise ContractViolation(f"no weight for dataset {e.scope!r}")
        if not w > 0:
            raise ContractViolation(f"weight for {e.scope!r} must be positive, got {w}")
        ws.append(w)
    return _combine("weighted_total", estimates, ws)


def _nearest_rate(rates: Mapping[int, float], year: int) -> float:
    if year in rates:
        return rates[year]
    # ties go to the earlier year
    best = min(rates, key=lambda y: (abs(y - year), y))
    return rates[best]


def temporal_expected(
    year_histogram: Mapping[int, int], base_rate_by_year: Mapping[int, float], u: float
) -> float:
    """Expected share with the base rate averaged over document years."""
    counts = {y: n for y, n in year_histogram.items() if n}
    if not counts:
        raise ContractViolation("year histogram is empty")
    if not base_rate_by_year:
        raise ContractViolation("base_rate_by_year is empty")
    if any(n < 0 for n in counts.values()):
        raise ContractViolation("year histogram has negative counts")
    years = sorted(counts)
    mean_rate = _exact_mean([_nearest_rate(base_rate_by_year, y) for y in years], [counts[y] for y in years])
    return expected_pct(mean_rate, u)


def census_coverage(
    census: Iterable[tuple[str, int]],
    frame: NameFrame,
    p: float,
    population: float,
    base_rate: float,
) -> float:
    """Share of the group that carries a frame surname, from a surname census.

    Frame bearers in the census are discounted by precision ``p`` and compared
    with the group size ``population * base_rate``.
    """
    denom = population * base_rate
    if not denom > 0:
        raise ContractViolation("population * base_rate must be positive")
    bearers = 0
    for name, count in census:
        if count < 0:
            raise ContractViolation(f"negative census count for {name!r}")
        try:
            norm = normalize_surname(name)
        except NormalizationError:
            continue
        if match_surname(frame, norm):
            bearers += count
    return bearers * p / denom


def us_fraction_from_counts(us_count: int, total_count: int) -> float:
    if total_count <= 0:
        raise ContractViolation("total_count must be positive")
    if not 0 <= us_count <= total_count:
        raise ContractViolation(f"need 0 <= us_count <= total_count, got {us_count}/{total_count}")
    return us_count / total_count


def normalize_institution(name: str) -> str:
    text = unicodedata.normalize("NFD", name)
    text = "".join(ch for ch in text if not unicodedata.combining(ch))
    return " ".join(text.casefold().split())


def us_fraction_from_affiliations(affiliations: Iterable[str], us_institutions: Iterable[str]) -> float:
    """Share of records whose affiliation is a listed US institution.

    Matching is exact after case/whitespace/diacritic normalization, so
    spelling variants are missed and the result is a lower bound.
    """
    listed = {normalize_institution(s) for s in us_institutions}
    listed.discard("")
    if not listed:
        raise ContractViolation("US institution list is empty")
    seen = hits = 0
    for aff in affiliations:
        seen += 1
        if aff and normalize_institution(aff) in listed:
            hits += 1
    if seen == 0:
        raise ContractViolation("no affiliations supplied")
    return hits / seen


def merge_stats(a: DatasetStats, b: DatasetStats) -> DatasetStats:
    if a.dataset_id != b.dataset_id:
        raise ContractViolation(f"cannot merge {a.dataset_id!r} with {b.dataset_id!r}")
    if a.weight != b.weight:
        raise ContractViolation(f"{a.dataset_id}: cannot merge stats with different weights")
    years = Counter(a.year_histogram)
    years.update(b.year_histogram)
    return DatasetStats(
        dataset_id=a.dataset_id,
        total_pairs=a.total_pairs + b.total_pairs,
        matched_pairs=a.matched_pairs + b.matched_pairs,
        weight=a.weight,
        year_histogram=dict(sorted(years.items())),
    )
