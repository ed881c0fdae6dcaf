"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line each."""
import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.skipped:
        return
    number, title = marker.args
    _, failed = _RESULTS.get(number, (title, False))
    # a criterion fails if setup, call or teardown fails
    _RESULTS[number] = (title, failed or report.failed)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, failed = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'FAIL' if failed else 'PASS'}  {title}")
    passed = sum(not failed for _, failed in _RESULTS.values())
    terminalreporter.write_line(f"{passed}/{len(_RESULTS)} criteria pass")
