from pathlib import Path

import pytest

from hrex.ontology import default_ontology

FIXTURES = Path(__file__).parent / "fixtures"

_acceptance_results: list[tuple[str, str, str]] = []


@pytest.fixture(scope="session")
def hyperred_ontology():
    return default_ontology()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    doc = dict(report.user_properties).get("criterion", report.nodeid.split("::")[-1])
    outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
    _acceptance_results.append((doc, outcome, report.nodeid))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for doc, outcome, _ in _acceptance_results:
        terminalreporter.write_line(f"{outcome}  {doc}")
