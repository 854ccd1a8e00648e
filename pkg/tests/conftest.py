import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE = {}
CRASHED = []


@pytest.fixture
def criterion(request):
    """Record pass/fail of one acceptance criterion for the terminal summary."""
    def record(number, title, ok, detail=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        ACCEPTANCE[request.node.nodeid] = (number, line)
        print(line)
        return ok
    return record


def pytest_runtest_logreport(report):
    if report.when == "call" and report.failed and "test_acceptance" in report.nodeid:
        CRASHED.append(report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE and not CRASHED:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE.values()):
        terminalreporter.write_line(line)
    for nodeid in CRASHED:
        if nodeid not in ACCEPTANCE:
            terminalreporter.write_line(f"FAIL (raised before reporting)  {nodeid}")
