import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

SESSION_START = time.perf_counter()
_criteria: dict[int, dict] = {}
_node_criterion: dict[str, int] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(session, config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is None:
            continue
        number, title = mark.args
        _node_criterion[item.nodeid] = number
        _criteria.setdefault(number, {"title": title, "outcomes": []})
    # the wall-clock criterion measures everything before it, so it runs last
    items.sort(key=lambda item: _node_criterion.get(item.nodeid) == 14)


def pytest_runtest_logreport(report):
    number = _node_criterion.get(report.nodeid)
    if number is None:
        return
    if report.when == "call" or report.failed or report.skipped:
        _criteria[number]["outcomes"].append("skipped" if report.skipped else report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        outcomes = entry["outcomes"]
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {entry['title']}")
