import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# filled by test_acceptance; printed at the end of the session
ACCEPTANCE_LINES = {}


def record_acceptance(number: int, title: str, passed: bool, detail: str):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title} | {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
