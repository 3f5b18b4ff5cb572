import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[str, dict] = {}


@pytest.fixture
def criterion(request):
    """Record a measured summary for an acceptance criterion."""
    entry = _CRITERIA.setdefault(request.node.nodeid, {"label": "", "detail": "", "outcome": "not run"})

    def record(label: str, detail: str = ""):
        entry["label"] = label
        entry["detail"] = detail

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    entry = _CRITERIA.get(item.nodeid)
    if entry is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        entry["outcome"] = rep.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_CRITERIA, key=lambda n: _CRITERIA[n]["label"]):
        e = _CRITERIA[nodeid]
        verdict = "PASS" if e["outcome"] == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {e['label']}  {e['detail']}")
