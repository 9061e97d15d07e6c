"""Distinctive-surname frames: normalization, matching, and loading."""
from __future__ import annotations

import json
import logging
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from corpus_audit.errors import ConfigError, ContractViolation, NormalizationError

log = logging.getLogger(__name__)

# Reserved surname for author strings that could not be parsed. It is kept in
# the denominator and can never match a frame.
UNPARSEABLE = "<UNPARSEABLE>"

GENERATIONAL_SUFFIXES = frozenset({"JR", "SR", "II", "III", "IV"})
_EDGE_PUNCT = ".,;:"

# Recorded verbatim in report metadata so results stay auditable.
NORMALIZATION_RULES = (
    "trim whitespace; canonical decomposition with combining marks removed; "
    "case-fold then upper-case; interior hyphens kept; trailing Jr/Sr/II/III/IV removed"
)


def _strip_marks(text: str) -> str:
    decomposed = unicodedata.normalize("NFD", text)
    kept = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return unicodedata.normalize("NFC", kept)


def _normalize_once(text: str) -> str:
    text = _strip_marks(_strip_marks(text).casefold().upper())
    tokens = [t for t in text.split() if t.strip(_EDGE_PUNCT)]
    while len(tokens) > 1 and tokens[-1].strip(_EDGE_PUNCT) in GENERATIONAL_SUFFIXES:
        tokens.pop()
    return " ".join(tokens).strip(_EDGE_PUNCT + " ")


@lru_cache(maxsize=1 << 16)
def normalize_surname(raw: str) -> str:
    """Return the canonical form of a surname.

    >>> normalize_surname("  Goldberg ")
    'GOLDBERG'
    >>> normalize_surname("Müller-Katz")
    'MULLER-KATZ'
    >>> normalize_surname("Cohen Jr.")
    'COHEN'

    Raises NormalizationError when nothing is left after normalization.
    """
    if not isinstance(raw, str):
        raise NormalizationError(f"surname must be text, got {type(raw).__name__}")
    text = raw
    # a single pass is a fixed point for nearly every input; the loop covers
    # case mappings that expand into further decomposable characters
    for _ in range(8):
        nxt = _normalize_once(text)
        if nxt == text:
            break
        text = nxt
    if not text:
        raise NormalizationError(f"empty surname after normalization: {raw!r}")
    return text


@dataclass(frozen=True)
class NameFrame:
    label: str
    surnames: frozenset[str] = field(repr=False)
    precision_range: tuple[float, float]
    coverage_range: tuple[float, float]
    provenance: str = ""

    def __post_init__(self) -> None:
        if not self.surnames:
            raise ConfigError(f"frame {self.label!r}: surname list is empty")
        for name in self.surnames:
            if name == UNPARSEABLE:
                raise ConfigError(f"frame {self.label!r}: reserved sentinel in surname list")
            try:
                ok = normalize_surname(name) == name
            except NormalizationError:
                ok = False
            if not ok:
                raise ConfigError(f"frame {self.label!r}: surname entry is not normalized")
        _check_fraction_range(self.label, "precision_range", self.precision_range)
        _check_fraction_range(self.label, "coverage_range", self.coverage_range)

    def __len__(self) -> int:
        return len(self.surnames)


def _check_fraction_range(label: str, name: str, rng: tuple[float, float]) -> None:
    lo, hi = rng
    if not (0.0 < lo <= hi <= 1.0):
        raise ConfigError(f"frame {label!r}: {name} must satisfy 0 < lb <= ub <= 1, got {list(rng)}")


def match_surname(frame: NameFrame, surname: str) -> bool:
    """Exact whole-surname membership. ``surname`` must already be normalized."""
    if surname == UNPARSEABLE:
        return False
    if normalize_surname(surname) != surname:
        raise ContractViolation(f"surname is not normalized: {surname!r}")
    return surname in frame.surnames


def load_frame(path: str | Path) -> NameFrame:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read frame file: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path}: frame file is not UTF-8 (byte {exc.start})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    for key in ("label", "surnames", "precision_range", "coverage_range"):
        if key not in doc:
            raise ConfigError(f"{path}: missing field {key!r}")
    raw = doc["surnames"]
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{path}: field 'surnames' must be a non-empty array")
    surnames = set()
    for i, entry in enumerate(raw):
        if not isinstance(entry, str):
            raise ConfigError(f"{path}: surnames[{i}] is not a string")
        try:
            surnames.add(normalize_surname(entry))
        except NormalizationError as exc:
            raise ConfigError(f"{path}: surnames[{i}]: {exc}") from exc
    if len(surnames) < len(raw):
        log.warning("%s: %d duplicate surnames collapsed on load", path, len(raw) - len(surnames))
    try:
        return NameFrame(
            label=str(doc["label"]),
            surnames=frozenset(surnames),
            precision_range=_pair(doc["precision_range"], path, "precision_range"),
            coverage_range=_pair(doc["coverage_range"], path, "coverage_range"),
            provenance=str(doc.get("provenance", "")),
        )
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _pair(value, path: Path, name: str) -> tuple[float, float]:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise ConfigError(f"{path}: field {name!r} must be [lb, ub]")
    return float(value[0]), float(value[1])
