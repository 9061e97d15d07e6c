from __future__ import annotations

from pathlib import Path

import pytest

from corpus_audit.frame import NameFrame

FIXTURES = Path(__file__).parent / "fixtures"

# (criterion, verdict, detail) lines collected by test_acceptance.py
ACCEPTANCE_LINES: list[tuple[str, str, str]] = []


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def frame() -> NameFrame:
    return NameFrame(
        label="test",
        surnames=frozenset({"KATZ", "GOLDBERG", "COHEN", "LOVELACE", "LEVY"}),
        precision_range=(0.80, 0.90),
        coverage_range=(0.0915, 0.1118),
    )


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit, verdict, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"[{verdict}] criterion {crit}: {detail}")


@pytest.fixture(scope="session")
def calibrated():
    """(stats, params, weights) for the weight-calibrated results fixture."""
    from corpus_audit.config import load_config
    from corpus_audit.pipeline import build_stats

    config = load_config(FIXTURES / "table1" / "config_calibrated.json")
    frame = config.load_frame()
    stats = build_stats(config, frame)
    return stats, config.estimation_params(frame), {s.dataset_id: s.weight for s in stats}
