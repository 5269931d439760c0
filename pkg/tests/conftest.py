import re
from collections import defaultdict

import pytest

_CRITERION = re.compile(r"test_c(\d+)_")
_outcomes = defaultdict(list)
_titles = {}


@pytest.fixture
def record(request):
    """Attach a one-line measurement to an acceptance test."""
    def _record(text):
        request.node.user_properties.append(("detail", text))
    return _record


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    match = _CRITERION.match(name)
    if not match or not (report.when == "call" or report.outcome != "passed"):
        return
    details = [v for k, v in report.user_properties if k == "detail"]
    _outcomes[int(match.group(1))].append((name, report.outcome, details))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(_outcomes):
        runs = _outcomes[c]
        ok = all(outcome == "passed" for _, outcome, _ in runs)
        tr.write_line(f"criterion {c}: {'PASS' if ok else 'FAIL'}")
        for name, outcome, details in runs:
            tr.write_line(f"    {outcome:>6}  {name}" + (f"  [{'; '.join(details)}]" if details else ""))
