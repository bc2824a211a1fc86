"""Shared pytest plumbing: surface acceptance verdict lines in the summary.

Acceptance checks record one "PASS/FAIL - name: detail" line each; fd-level
capture hides in-test prints, so they are replayed after the test session.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
