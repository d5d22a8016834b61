import pytest

ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title, seconds): acceptance criterion with a time budget")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call":
        return
    number, title, limit = marker.args
    if rep.passed and rep.duration >= limit:
        rep.outcome = "failed"
        rep.longrepr = f"runtime {rep.duration:.1f} s exceeds the {limit} s budget"
    ACCEPTANCE[number] = (rep.passed, title, rep.duration, limit)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, elapsed, limit = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n}. {title} ({elapsed:.1f} s, budget {limit} s)")
