import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# filled by test_acceptance; printed after the run
ACCEPTANCE = {}
REPORTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE and not REPORTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
    for text in REPORTS:
        terminalreporter.write_line(text)
