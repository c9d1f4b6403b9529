import pytest

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    state = _ACCEPTANCE.setdefault(number, {"title": title, "passed": True, "seconds": 0.0})
    # setup time counts so that module fixtures doing the work are charged to their criterion
    if report.when in ("setup", "call"):
        state["seconds"] += report.duration
    if report.when == "call" or report.failed:
        state["passed"] = state["passed"] and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        state = _ACCEPTANCE[number]
        verdict = "PASS" if state["passed"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {state['title']}  ({state['seconds']:.2f} s)")
