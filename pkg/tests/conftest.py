import pytest

_ACCEPTANCE: dict[str, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    key, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    if report.failed:
        msg = str(report.longrepr).strip().splitlines()[-1] if report.longrepr else ""
        _ACCEPTANCE[key] = ("FAIL", title, detail or msg)
    elif report.when == "call":
        _ACCEPTANCE[key] = ("PASS", title, detail)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(key, title): acceptance criterion reported in the summary")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        status, title, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {status} {title}" + (f" ({detail})" if detail else ""))
