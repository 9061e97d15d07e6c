"""Run configuration and parameter files (JSON).

Relative paths inside a file resolve against that file's directory.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from corpus_audit.errors import ConfigError, ContractViolation
from corpus_audit.estimator import DATASETS, EstimationParams
from corpus_audit.frame import NameFrame, load_frame
from corpus_audit.ingest.records import DEFAULT_REJECT_BUDGET
from corpus_audit.sensitivity import PARAMETERS


def read_json(path: str | Path, what: str) -> dict[str, Any]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read {what}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: {what} must be a JSON object")
    return doc


def _resolve(base: Path, value: Any, where: str) -> Path:
    if not isinstance(value, str) or not value:
        raise ConfigError(f"{where}: expected a path string")
    p = Path(value)
    return p if p.is_absolute() else base / p


def _must_exist(p: Path, where: str) -> Path:
    if not p.exists():
        raise ConfigError(f"{where}: file not found: {p}")
    return p


def _range(value: Any, where: str) -> tuple[float, float]:
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value)):
        raise ConfigError(f"{where}: expected [lb, ub]")
    return float(value[0]), float(value[1])


@dataclass(frozen=True)
class Weight:
    value: float
    provenance: str = ""


def _weights(raw: Any, where: str) -> dict[str, Weight]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: weights must be an object")
    out = {}
    for ds, w in raw.items():
        if isinstance(w, dict):
            value, prov = w.get("value"), str(w.get("provenance", ""))
        else:
            value, prov = w, ""
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0:
            raise ConfigError(f"{where}: weight for {ds!r} must be a positive number")
        out[ds] = Weight(float(value), prov)
    return out


@dataclass(frozen=True)
class ParamFile:
    path: Path
    raw: dict[str, Any]
    base_rate_range: tuple[float, float]
    us_fraction: dict[str, float]
    weights: dict[str, Weight]
    frame_path: Path | None
    provenance: dict[str, Any]


def load_params(path: str | Path) -> ParamFile:
    path = Path(path)
    raw = read_json(path, "parameter file")
    if "base_rate_range" not in raw:
        raise ConfigError(f"{path}: missing field 'base_rate_range'")
    us = raw.get("us_fraction", {})
    if not isinstance(us, dict) or not all(isinstance(v, (int, float)) for v in us.values()):
        raise ConfigError(f"{path}: us_fraction must map dataset ids to numbers")
    frame_path = _resolve(path.parent, raw["frame"], f"{path}: frame") if "frame" in raw else None
    return ParamFile(
        path=path,
        raw=raw,
        base_rate_range=_range(raw["base_rate_range"], f"{path}: base_rate_range"),
        us_fraction={k: float(v) for k, v in us.items()},
        weights=_weights(raw.get("weights"), f"{path}: weights"),
        frame_path=frame_path,
        provenance=raw.get("provenance", {}),
    )


@dataclass(frozen=True)
class DatasetInput:
    """Either pair-record files to count, or precomputed counts."""

    dataset_id: str
    pair_files: tuple[Path, ...] = ()
    counts: dict[str, Any] | None = None
    summary_files: tuple[Path, ...] = ()


@dataclass(frozen=True)
class AuditConfig:
    path: Path | None
    raw: dict[str, Any]
    frame_path: Path
    params: ParamFile
    datasets: tuple[DatasetInput, ...]
    weights: dict[str, Weight]
    sample_fraction: float | None = None
    sample_seed: int | None = None
    reject_budget: float = DEFAULT_REJECT_BUDGET
    sensitivity: tuple[str, ...] = ()
    target_rdm: float = 1.0
    outputs: dict[str, Path] = field(default_factory=dict)
    timestamp: str | None = None
    unsafe_debug: bool = False

    def load_frame(self) -> NameFrame:
        return load_frame(self.frame_path)

    def estimation_params(self, frame: NameFrame | None = None) -> EstimationParams:
        try:
            return EstimationParams(
                frame=frame or self.load_frame(),
                base_rate_range=self.params.base_rate_range,
                us_fraction=self.params.us_fraction,
            )
        except ContractViolation as exc:
            raise ConfigError(f"{self.params.path}: {exc}") from exc

    def digest(self) -> str:
        """SHA-256 over the config, the parameter file and the frame file bytes."""
        h = hashlib.sha256()
        h.update(json.dumps(self.raw, sort_keys=True, separators=(",", ":")).encode())
        h.update(json.dumps(self.params.raw, sort_keys=True, separators=(",", ":")).encode())
        h.update(hashlib.sha256(self.frame_path.read_bytes()).digest())
        return h.hexdigest()


def _dataset_input(base: Path, ds: str, value: Any, where: str) -> DatasetInput:
    if ds not in DATASETS:
        raise ConfigError(f"{where}: unknown dataset {ds!r}; expected one of {DATASETS}")
    if isinstance(value, str):
        value = {"pairs": [value]}
    elif isinstance(value, list):
        value = {"pairs": value}
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: dataset {ds!r} must be a path, a list of paths, or an object")
    summaries = value.get("summary", [])
    summaries = [summaries] if isinstance(summaries, str) else summaries
    summary_files = tuple(_must_exist(_resolve(base, s, where), where) for s in summaries)
    if "pairs" in value:
        files = tuple(_must_exist(_resolve(base, p, f"{where}.{ds}"), f"{where}.{ds}") for p in value["pairs"])
        if not files:
            raise ConfigError(f"{where}: dataset {ds!r} lists no pair files")
        return DatasetInput(ds, pair_files=files, summary_files=summary_files)
    if "total_pairs" in value and "matched_pairs" in value:
        return DatasetInput(ds, counts=value, summary_files=summary_files)
    raise ConfigError(f"{where}: dataset {ds!r} needs 'pairs' or 'total_pairs'/'matched_pairs'")


def load_config(path: str | Path | None = None, raw: dict[str, Any] | None = None, **overrides: Any) -> AuditConfig:
    """Load and validate a run config. Keyword overrides replace top-level keys."""
    if raw is None:
        if path is None:
            raise ConfigError("no config given")
        raw = read_json(path, "config")
    raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    base = Path(path).parent if path is not None else Path.cwd()
    where = str(path or "<config>")

    if "params" not in raw:
        raise ConfigError(f"{where}: missing field 'params'")
    params = load_params(_must_exist(_resolve(base, raw["params"], f"{where}: params"), f"{where}: params"))
    if "frame" in raw:
        frame_path = _resolve(base, raw["frame"], f"{where}: frame")
    elif params.frame_path is not None:
        frame_path = params.frame_path
    else:
        raise ConfigError(f"{where}: no frame path in config or parameter file")
    _must_exist(frame_path, f"{where}: frame")

    datasets_raw = raw.get("datasets", {})
    if not isinstance(datasets_raw, dict):
        raise ConfigError(f"{where}: 'datasets' must be an object")
    datasets = tuple(
        _dataset_input(base, ds, datasets_raw[ds], f"{where}: datasets") for ds in DATASETS if ds in datasets_raw
    )
    unknown = set(datasets_raw) - set(DATASETS)
    if unknown:
        raise ConfigError(f"{where}: unknown datasets {sorted(unknown)}")

    weights = {**params.weights, **_weights(raw.get("weights"), f"{where}: weights")}

    sample = raw.get("sample") or {}
    fraction, seed = sample.get("fraction"), sample.get("seed")
    if fraction is not None:
        if not isinstance(fraction, (int, float)) or not 0 < fraction <= 1:
            raise ConfigError(f"{where}: sample.fraction must be in (0, 1]")
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError(f"{where}: sample.seed is required when sampling")

    budget = raw.get("reject_budget", DEFAULT_REJECT_BUDGET)
    if not isinstance(budget, (int, float)) or not 0 <= budget <= 1:
        raise ConfigError(f"{where}: reject_budget must be in [0, 1]")

    sens = raw.get("sensitivity", [])
    if sens is True:
        sens = list(PARAMETERS)
    elif sens is False or sens is None:
        sens = []
    if not isinstance(sens, list) or any(p not in PARAMETERS for p in sens):
        raise ConfigError(f"{where}: sensitivity must be true or a list drawn from {PARAMETERS}")

    target = raw.get("target_rdm", 1.0)
    if not isinstance(target, (int, float)) or not target > 0:
        raise ConfigError(f"{where}: target_rdm must be positive")

    outputs_raw = raw.get("outputs", {})
    if not isinstance(outputs_raw, dict):
        raise ConfigError(f"{where}: 'outputs' must be an object")
    outputs = {k: _resolve(base, v, f"{where}: outputs.{k}") for k, v in outputs_raw.items()}

    return AuditConfig(
        path=Path(path) if path is not None else None,
        raw=raw,
        frame_path=frame_path,
        params=params,
        datasets=datasets,
        weights=weights,
        sample_fraction=fraction,
        sample_seed=seed,
        reject_budget=float(budget),
        sensitivity=tuple(sens),
        target_rdm=float(target),
        outputs=outputs,
        timestamp=raw.get("timestamp"),
        unsafe_debug=bool(raw.get("unsafe_debug", False)),
    )
