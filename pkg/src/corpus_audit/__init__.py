"""Authorship audit toolkit for LLM training-corpus metadata.

Counts (document x author) pairs whose surname falls in a distinctive-surname
frame and turns the match rate into bounded over-representation estimates.
"""
from corpus_audit.errors import (
    AuditError,
    ConfigError,
    ContractViolation,
    RejectBudgetExceeded,
)
from corpus_audit.frame import NameFrame, load_frame, match_surname, normalize_surname

__version__ = "0.1.0"

__all__ = [
    "AuditError",
    "ConfigError",
    "ContractViolation",
    "NameFrame",
    "RejectBudgetExceeded",
    "load_frame",
    "match_surname",
    "normalize_surname",
]
