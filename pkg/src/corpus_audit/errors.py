"""Exception hierarchy. The CLI maps each family to an exit code."""
from __future__ import annotations


class AuditError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(AuditError, ValueError):
    """Bad configuration, frame file, or parameter file (exit code 2)."""


class RejectBudgetExceeded(AuditError):
    """Too many malformed input records during ingest (exit code 3)."""


class ContractViolation(AuditError, ValueError):
    """An operation was called outside its preconditions (exit code 4)."""


class NormalizationError(ContractViolation):
    """A surname was empty after normalization."""
