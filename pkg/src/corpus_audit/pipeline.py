"""count -> observed -> expected -> RDM -> totals, driven by an AuditConfig."""
from __future__ import annotations

import itertools
import json
from typing import Any

from corpus_audit import __version__
from corpus_audit.config import AuditConfig
from corpus_audit.errors import ConfigError
from corpus_audit.estimator import DatasetStats, EstimationParams, estimate_dataset, total, weighted_total
from corpus_audit.frame import NORMALIZATION_RULES, NameFrame
from corpus_audit.ingest.records import count_pairs, read_pairs
from corpus_audit.report import AuditReport
from corpus_audit.sensitivity import break_even


def build_stats(config: AuditConfig, frame: NameFrame) -> list[DatasetStats]:
    stats = []
    for ds in config.datasets:
        weight = config.weights[ds.dataset_id].value if ds.dataset_id in config.weights else 1.0
        if ds.pair_files:
            records = itertools.chain.from_iterable(read_pairs(p) for p in ds.pair_files)
            stats.append(count_pairs(records, frame, weight, dataset_id=ds.dataset_id))
        else:
            c = ds.counts or {}
            years = {int(y): int(n) for y, n in (c.get("year_histogram") or {}).items()}
            try:
                stats.append(
                    DatasetStats(ds.dataset_id, int(c["total_pairs"]), int(c["matched_pairs"]), weight, years)
                )
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"dataset {ds.dataset_id}: bad counts: {exc}") from exc
    return stats


def _summaries(config: AuditConfig) -> list[dict[str, Any]]:
    out = []
    for ds in config.datasets:
        for path in ds.summary_files:
            try:
                out.append(json.loads(path.read_text(encoding="utf-8")))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"{path}: unreadable ingest summary: {exc}") from exc
    return out


def weights_complete(config: AuditConfig, stats: list[DatasetStats]) -> bool:
    return bool(stats) and all(s.dataset_id in config.weights for s in stats)


def run_estimate(config: AuditConfig, *, with_sensitivity: bool | None = None) -> AuditReport:
    frame = config.load_frame()
    params = config.estimation_params(frame)
    stats = build_stats(config, frame)
    estimates = [estimate_dataset(s, params) for s in stats]
    weighted = weights_complete(config, stats)
    weights = {s.dataset_id: s.weight for s in stats}

    report = AuditReport(
        metadata=_metadata(config, frame, weighted),
        estimates=estimates,
        total=total(estimates) if estimates else None,
        weighted_total=weighted_total(estimates, weights) if estimates and weighted else None,
        ingest_summaries=_summaries(config),
        stats=[
            {"dataset_id": s.dataset_id, "total_pairs": s.total_pairs, "matched_pairs": s.matched_pairs}
            for s in stats
        ],
        parameters=_parameters(config, params, stats),
    )
    run_sens = config.sensitivity if with_sensitivity is None else (config.sensitivity or with_sensitivity)
    if run_sens and estimates:
        if not weighted:
            raise ConfigError("break-even analysis needs a weight for every dataset")
        names = config.sensitivity or ("precision", "coverage", "base_rate")
        report.break_even = [break_even(stats, params, weights, p, config.target_rdm) for p in names]
    if config.unsafe_debug:
        report.debug = {"frame_surnames": sorted(frame.surnames)}
    return report


def _metadata(config: AuditConfig, frame: NameFrame, weighted: bool) -> dict[str, Any]:
    meta: dict[str, Any] = {
        "tool": "corpus-audit",
        "version": __version__,
        "config_digest": config.digest(),
        "frame_label": frame.label,
        "frame_size": len(frame),
        "normalization_rules": NORMALIZATION_RULES,
        "unsafe_debug": config.unsafe_debug,
        "weighted_total": "computed" if weighted else "omitted: weights not configured for every dataset",
        "timestamp": config.timestamp,
    }
    return meta


def _parameters(config: AuditConfig, params: EstimationParams, stats: list[DatasetStats]) -> dict[str, Any]:
    return {
        "precision_range": list(params.frame.precision_range),
        "coverage_range": list(params.frame.coverage_range),
        "base_rate_range": list(params.base_rate_range),
        "us_fraction": {s.dataset_id: params.us_fraction_for(s.dataset_id) for s in stats},
        "weights": {
            ds: {"value": w.value, "provenance": w.provenance} for ds, w in sorted(config.weights.items())
        },
        "frame_provenance": params.frame.provenance,
        "provenance": config.params.provenance,
    }
