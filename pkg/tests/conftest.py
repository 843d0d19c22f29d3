"""Shared test plumbing.

test_acceptance appends one line per acceptance item; the summary hook
prints them after the run so they are visible without -s.
"""

ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
