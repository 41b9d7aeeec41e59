import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    entry = _RESULTS.setdefault(n, {"title": title, "ok": True, "seconds": 0.0, "ran": False})
    if rep.when == "call":
        entry["ran"] = True
        entry["seconds"] += rep.duration
    if rep.failed or (rep.when == "call" and rep.skipped):
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        e = _RESULTS[n]
        status = "PASS" if e["ok"] and e["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}  {e['title']}  ({e['seconds']:.2f}s)")
