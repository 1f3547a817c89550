"""Shared test plumbing: the acceptance-criterion result registry.

test_acceptance.py records one entry per criterion; the terminal summary
hook prints a PASS/FAIL line for each so the acceptance status is visible
in plain pytest output.
"""

ACCEPTANCE_RESULTS = []


def record_acceptance(criterion: int, description: str, ok: bool, detail: str = ""):
    ACCEPTANCE_RESULTS.append((criterion, description, bool(ok), detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, description, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        line = f"ACCEPTANCE {criterion}: {status} - {description}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
