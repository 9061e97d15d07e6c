"""Corpus metadata adapters producing (document x author) pair records."""
from corpus_audit.ingest.arxiv import parse_arxiv
from corpus_audit.ingest.books3 import parse_books3
from corpus_audit.ingest.freelaw import AmbiguousJoinError, parse_freelaw
from corpus_audit.ingest.github import parse_github
from corpus_audit.ingest.pubmed import parse_pubmed
from corpus_audit.ingest.records import (
    DEFAULT_REJECT_BUDGET,
    IngestSummary,
    PairRecord,
    count_pairs,
    enforce_reject_budget,
    read_pairs,
    write_pairs,
    write_summary,
)
from corpus_audit.ingest.sampling import sample_documents, sample_uniform

__all__ = [
    "DEFAULT_REJECT_BUDGET",
    "AmbiguousJoinError",
    "IngestSummary",
    "PairRecord",
    "count_pairs",
    "enforce_reject_budget",
    "parse_arxiv",
    "parse_books3",
    "parse_freelaw",
    "parse_github",
    "parse_pubmed",
    "read_pairs",
    "sample_documents",
    "sample_uniform",
    "write_pairs",
    "write_summary",
]
