import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when == "teardown":
        return
    if call.when == "setup" and call.excinfo is None:
        return
    n, title = mark.args
    ok = _CRITERIA.get(n, (title, True))[1] and call.excinfo is None
    _CRITERIA[n] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
