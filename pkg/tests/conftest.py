"""Collects acceptance-criterion outcomes and prints one line per criterion."""

_RESULTS = {}


def pytest_runtest_logreport(report):
    marker = _ACCEPTANCE.get(report.nodeid)
    if marker is None:
        return
    number, title = marker
    if report.when == "call" or report.outcome != "passed":
        status = "PASS" if report.passed else "FAIL"
        if report.skipped:
            status = "SKIP"
        prev = _RESULTS.get(number)
        if prev is None or prev[1] == "PASS":
            detail = "; ".join(f"{k}={v}" for k, v in report.user_properties)
            _RESULTS[number] = (title, status, detail)


_ACCEPTANCE = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            _ACCEPTANCE[item.nodeid] = mark.args


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status, detail = _RESULTS[number]
        line = f"[{status}] criterion {number:2d}: {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
