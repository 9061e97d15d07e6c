"""Surname extraction from free-text author strings."""
from __future__ import annotations

import re

from corpus_audit.frame import GENERATIONAL_SUFFIXES, NormalizationError, normalize_surname

LAST_TOKEN = "last-token"
PARTICLES = "particles"
SURNAME_RULES = (LAST_TOKEN, PARTICLES)

# Used only under the "particles" rule: "Ursula K. Le Guin" -> "LE GUIN".
DEFAULT_PARTICLES = frozenset(
    {"DE", "DA", "DI", "DEL", "DELLA", "DOS", "DU", "LE", "LA", "VAN", "VON", "DER", "DEN", "TER", "BEN", "BIN", "BAR"}
)

_AUTHOR_SPLIT = re.compile(r"\s*;\s*|\s+&\s+|\s+and\s+", re.IGNORECASE)
_HAS_LETTER = re.compile(r"[^\W\d_]")


def _is_suffix(part: str) -> bool:
    return part.strip().strip(".").upper() in GENERATIONAL_SUFFIXES


def split_authors(field: str) -> tuple[list[str], str]:
    """Split a multi-author string. Returns the parts and the rule that fired.

    Semicolons, ``&`` and ``and`` always delimit. Commas delimit only when every
    comma-separated piece looks like a full name (two or more tokens);
    otherwise the comma is read as ``Last, First``.
    """
    parts = [p for p in _AUTHOR_SPLIT.split(field) if p.strip()]
    if len(parts) > 1:
        return [p.strip() for p in parts], "delimited"
    text = field.strip()
    if "," in text:
        pieces = [p.strip() for p in text.split(",") if p.strip() and not _is_suffix(p)]
        if len(pieces) > 1 and all(len(p.split()) >= 2 for p in pieces):
            return pieces, "comma_list"
    return [text] if text else [], "single"


def surname_from_fullname(
    name: str, rule: str = LAST_TOKEN, particles: frozenset[str] = DEFAULT_PARTICLES
) -> tuple[str | None, str]:
    """Pick the normalized surname out of one author's full name.

    Returns ``(surname, how)``; surname is None when nothing usable remains.
    """
    text = name.strip()
    if not text or not _HAS_LETTER.search(text):
        return None, "unparseable"
    if "," in text:
        pieces = [p.strip() for p in text.split(",") if p.strip()]
        pieces = [pieces[0]] + [p for p in pieces[1:] if not _is_suffix(p)]
        if len(pieces) >= 2:
            # "Le Guin, Ursula K." names the surname explicitly
            surname = _norm(pieces[0])
            if surname is None or not _HAS_LETTER.search(surname):
                return None, "unparseable"
            return surname, "inverted"
        text = pieces[0] if pieces else ""
    full = _norm(text)
    if full is None:
        return None, "unparseable"
    tokens = full.split(" ")
    keep = 1
    if rule == PARTICLES:
        while keep < len(tokens) and tokens[-keep - 1] in particles:
            keep += 1
    elif rule != LAST_TOKEN:
        raise ValueError(f"unknown surname rule {rule!r}")
    surname = " ".join(tokens[-keep:])
    if not _HAS_LETTER.search(surname):
        return None, "unparseable"
    return surname, "particles" if keep > 1 else "last_token"


def _norm(text: str) -> str | None:
    try:
        return normalize_surname(text)
    except NormalizationError:
        return None
