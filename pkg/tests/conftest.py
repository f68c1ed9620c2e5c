"""Collects outcomes of tests marked ``criterion`` and prints one line each."""

import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    cid, text = mark.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        measured = dict(item.user_properties).get("measured", "")
        _RESULTS[cid] = (report.passed, text, measured)


def _order(cid):
    num = "".join(ch for ch in cid if ch.isdigit())
    return int(num), cid


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_RESULTS, key=_order):
        passed, text, measured = _RESULTS[cid]
        line = f"criterion {cid:>3}: {'PASS' if passed else 'FAIL'}  {text}"
        if measured:
            line += f"  [{measured}]"
        terminalreporter.write_line(line)
