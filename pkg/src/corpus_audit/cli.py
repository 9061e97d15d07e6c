"""Command-line entry point.

Exit codes: 0 success, 2 config error, 3 ingest reject budget exceeded,
4 estimation contract violation.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from collections.abc import Callable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from corpus_audit import report as rpt
from corpus_audit.config import load_config
from corpus_audit.errors import ConfigError, ContractViolation, RejectBudgetExceeded
from corpus_audit.estimator import DATASETS, census_coverage
from corpus_audit.frame import load_frame
from corpus_audit.ingest import (
    IngestSummary,
    PairRecord,
    enforce_reject_budget,
    parse_arxiv,
    parse_books3,
    parse_freelaw,
    parse_github,
    parse_pubmed,
    sample_documents,
    sample_uniform,
    write_pairs,
    write_summary,
)
from corpus_audit.ingest.names import SURNAME_RULES
from corpus_audit.pipeline import run_estimate
from corpus_audit.sensitivity import PARAMETERS

log = logging.getLogger("corpus_audit")

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_CONTRACT = 0, 2, 3, 4


def _adapter(args: argparse.Namespace) -> Callable[[list[str], IngestSummary], Iterator[PairRecord]]:
    ds = args.dataset
    if ds == "pubmed_central":
        return lambda paths, s: parse_pubmed(paths, s)
    if ds == "books3":
        return lambda paths, s: parse_books3(paths, s, surname_rule=args.surname_rule)
    if ds == "arxiv":
        return lambda paths, s: parse_arxiv(paths, s, surname_rule=args.surname_rule)
    if ds == "github":
        return lambda paths, s: parse_github(paths, s)
    if ds == "freelaw":
        if not args.people:
            raise ConfigError("freelaw ingest needs --people")
        return lambda paths, s: parse_freelaw(paths, args.people, s)
    raise ConfigError(f"unknown dataset {ds!r}")


def _parse_all(args: argparse.Namespace) -> tuple[Iterator[PairRecord], IngestSummary]:
    adapter = _adapter(args)
    summary = IngestSummary(args.dataset)
    for p in args.inputs:
        if not Path(p).exists():
            raise ConfigError(f"input not found: {p}")
    if args.jobs > 1 and len(args.inputs) > 1:

        def work(path: str) -> tuple[list[PairRecord], IngestSummary]:
            local = IngestSummary(args.dataset)
            return list(adapter([path], local)), local

        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            parts = list(pool.map(work, args.inputs))
        for _, local in parts:
            summary.absorb(local)
        return (r for records, _ in parts for r in records), summary
    return adapter(args.inputs, summary), summary


def cmd_ingest(args: argparse.Namespace) -> int:
    if args.sample is not None and args.seed is None:
        raise ConfigError("--seed is required with --sample")
    records, summary = _parse_all(args)
    if args.sample is not None:
        records = sample_documents(records, args.sample, args.seed)
    out = Path(args.output)
    tmp = out.with_name(out.name + ".partial")
    kept = write_pairs(records, tmp)
    summary_path = Path(args.summary) if args.summary else out.with_name(out.name + ".summary.json")
    write_summary(summary, summary_path)
    if args.sample is not None:
        doc = json.loads(summary_path.read_text(encoding="utf-8"))
        doc["sampling"] = {"fraction": args.sample, "seed": args.seed, "records_kept": kept}
        summary_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    try:
        enforce_reject_budget(summary, args.reject_budget)
    except RejectBudgetExceeded:
        tmp.unlink(missing_ok=True)
        raise
    os.replace(tmp, out)
    print(
        f"{args.dataset}: {summary.documents_seen} documents, {kept} pair records written, "
        f"{summary.records_rejected} rejected -> {out}"
    )
    return EXIT_OK


def cmd_fetch_github(args: argparse.Namespace) -> int:
    from corpus_audit.ingest.github_client import GitHubClient, fetch_profiles, read_repo_list

    repos = read_repo_list(args.repo_list)
    if args.sample is not None:
        if args.seed is None:
            raise ConfigError("--seed is required with --sample")
        repos = sample_uniform(repos, args.sample, args.seed)
    client = GitHubClient(min_interval=args.min_interval)
    n = fetch_profiles(repos, args.output, client, max_contributors=args.max_contributors)
    print(f"fetched {n} repositories ({len(repos)} selected) -> {args.output}")
    return EXIT_OK


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def cmd_estimate(args: argparse.Namespace) -> int:
    config = load_config(args.config, unsafe_debug=True if args.unsafe_debug else None)
    report = run_estimate(config, with_sensitivity=args.sensitivity)
    json_out = args.json or config.outputs.get("json")
    csv_out = args.csv or config.outputs.get("csv")
    if json_out:
        rpt.export(report, json_out, "json")
    if csv_out:
        rpt.export(report, csv_out, "csv")
    table = rpt.render_table(report) + rpt.render_break_even(report.break_even)
    if config.outputs.get("table"):
        _emit(table, str(config.outputs["table"]))
    sys.stdout.write(table)
    return EXIT_OK


def cmd_sensitivity(args: argparse.Namespace) -> int:
    overrides = {"sensitivity": list(PARAMETERS) if args.parameter == "all" else [args.parameter]}
    if args.target_rdm is not None:
        overrides["target_rdm"] = args.target_rdm
    config = load_config(args.config, **overrides)
    report = run_estimate(config)
    sys.stdout.write(rpt.render_break_even(report.break_even))
    if args.json:
        _emit(json.dumps([b.to_dict() for b in report.break_even], indent=2, sort_keys=True) + "\n", args.json)
    return EXIT_OK


def read_census(path: str | Path) -> Iterator[tuple[str, int]]:
    """CSV with ``name`` and ``count`` columns (2010 census surname layout)."""
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if not reader.fieldnames or not {"name", "count"} <= {c.strip().lower() for c in reader.fieldnames}:
            raise ConfigError(f"{path}: census file needs 'name' and 'count' columns")
        cols = {c.strip().lower(): c for c in reader.fieldnames}
        for i, row in enumerate(reader, 2):
            name = (row[cols["name"]] or "").strip()
            try:
                count = int(str(row[cols["count"]]).replace(",", "").strip())
            except ValueError as exc:
                raise ConfigError(f"{path}:{i}: bad count {row[cols['count']]!r}") from exc
            if name:
                yield name, count


def cmd_census_coverage(args: argparse.Namespace) -> int:
    frame = load_frame(args.frame)
    census = list(read_census(args.census))
    for j in args.base_rate:
        c = census_coverage(census, frame, args.precision, args.population, j)
        print(f"base_rate={j:g} coverage={c!r} ({c * 100:.2f}%)")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    report = rpt.load_report(args.report)
    if args.format == "table":
        text = rpt.render_table(report) + rpt.render_break_even(report.break_even)
    elif args.format == "json":
        text = rpt.to_json(report)
    else:
        text = rpt.to_csv(report)
    _emit(text, args.output)
    return EXIT_OK


def cmd_domain_overlap(args: argparse.Namespace) -> int:
    a = rpt.domain_rank(rpt.load_domain_counts(args.list_a))
    b = rpt.domain_rank(rpt.load_domain_counts(args.list_b))
    n = rpt.top_k_overlap(a, args.k_a, b, args.k_b)
    print(f"top-{args.k_a} of A in top-{args.k_b} of B: {n}")
    return EXIT_OK


def _fraction(text: str) -> float:
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("must be in (0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corpus-audit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse corpus metadata into pair-record NDJSON")
    p.add_argument("dataset", choices=DATASETS)
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--people", help="CourtListener people file (freelaw only)")
    p.add_argument("--summary", help="ingest summary path (default: OUTPUT.summary.json)")
    p.add_argument("--sample", type=_fraction, help="keep this fraction of documents")
    p.add_argument("--seed", type=int)
    p.add_argument("--reject-budget", type=float, default=0.05)
    p.add_argument("--surname-rule", choices=SURNAME_RULES, default="last-token")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fetch-github", help="collect contributor names for a repository list")
    p.add_argument("repo_list")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--sample", type=_fraction)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-contributors", type=int)
    p.add_argument("--min-interval", type=float, default=0.75, help="seconds between requests")
    p.set_defaults(func=cmd_fetch_github)

    p = sub.add_parser("estimate", help="run the estimation pipeline from a config")
    p.add_argument("config")
    p.add_argument("--json")
    p.add_argument("--csv")
    p.add_argument("--sensitivity", action="store_true", help="add break-even results")
    p.add_argument("--unsafe-debug", action="store_true", help="include frame members (watermarked)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sensitivity", help="break-even value for one parameter")
    p.add_argument("config")
    p.add_argument("--parameter", choices=(*PARAMETERS, "all"), default="all")
    p.add_argument("--target-rdm", type=float)
    p.add_argument("--json")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("census-coverage", help="frame coverage from a census surname file")
    p.add_argument("census")
    p.add_argument("--frame", required=True)
    p.add_argument("--precision", type=_fraction, required=True)
    p.add_argument("--population", type=float, required=True)
    p.add_argument("--base-rate", type=_fraction, nargs="+", required=True)
    p.set_defaults(func=cmd_census_coverage)

    p = sub.add_parser("report", help="re-render a JSON report")
    p.add_argument("report")
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("domain-overlap", help="top-k overlap between two domain word-count lists")
    p.add_argument("list_a")
    p.add_argument("list_b")
    p.add_argument("--k-a", type=int, required=True)
    p.add_argument("--k-b", type=int, required=True)
    p.set_defaults(func=cmd_domain_overlap)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except RejectBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ContractViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
