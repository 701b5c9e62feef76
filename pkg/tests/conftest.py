"""Shared test configuration.

Adds a terminal summary section listing each acceptance criterion with a
single PASS/FAIL line, so a full run ends with a compact scoreboard.
"""

_acceptance_outcomes = {}


def pytest_runtest_logreport(report):
    if "::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        _acceptance_outcomes[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_acceptance_outcomes):
        name = nodeid.split("::")[-1]
        outcome = _acceptance_outcomes[nodeid]
        label = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{label}  {name}")
