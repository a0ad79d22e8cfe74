import os
import sys

sys.path.insert(0, os.path.dirname(__file__))


_CRITERIA = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.outcome != "passed":
        if report.outcome != "passed" or name not in _CRITERIA:
            _CRITERIA[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        number = int(name.split("_")[2])
        label = " ".join(name.split("_")[3:])
        verdict = "PASS" if _CRITERIA[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {label}")
