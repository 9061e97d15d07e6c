"""Deterministic seeded Bernoulli sampling."""
from __future__ import annotations

import random
from collections.abc import Iterable, Iterator, Sequence
from typing import TypeVar

from corpus_audit.errors import ContractViolation
from corpus_audit.ingest.records import PairRecord

T = TypeVar("T")


def _selector(fraction: float, seed: int):
    if not 0.0 < fraction <= 1.0:
        raise ContractViolation(f"sample fraction must be in (0, 1], got {fraction}")
    rng = random.Random(seed)
    # one draw per item even at fraction 1.0 so the stream position never
    # depends on the fraction
    return lambda: rng.random() < fraction


def sample_uniform(items: Iterable[T], fraction: float, seed: int) -> list[T]:
    """Keep each item independently with probability ``fraction``.

    Same items, fraction and seed always select the same subset, in input order.
    """
    keep = _selector(fraction, seed)
    return [item for item in items if keep()]


def sample_documents(records: Iterable[PairRecord], fraction: float, seed: int) -> Iterator[PairRecord]:
    """Document-level version of :func:`sample_uniform` over a pair stream.

    Adapters emit each document's pairs contiguously, so one draw is taken per
    run of equal ``document_id``. The kept documents are exactly
    ``sample_uniform(document_ids, fraction, seed)``.
    """
    keep = _selector(fraction, seed)
    current = object()
    selected = False
    for rec in records:
        if rec.document_id != current:
            current = rec.document_id
            selected = keep()
        if selected:
            yield rec


def binomial_band(n: int, fraction: float, sigmas: float = 4.0) -> tuple[float, float]:
    mean = n * fraction
    sd = (n * fraction * (1 - fraction)) ** 0.5
    return mean - sigmas * sd, mean + sigmas * sd


def unique_in_order(values: Sequence[T]) -> list[T]:
    return list(dict.fromkeys(values))
