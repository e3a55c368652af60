"""Shared test plumbing.

Acceptance tests record one PASS/FAIL line per criterion here; the
terminal-summary hook prints them after capture ends so they always
appear in the pytest log.
"""

ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
