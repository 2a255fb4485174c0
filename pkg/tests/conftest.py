import pytest

_verdicts: dict[str, str] = {}
_acceptance_runs: list[tuple[str, str]] = []


@pytest.fixture
def criterion(request):
    """Record the one-line verdict of an acceptance criterion, then assert it."""

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {title}: {detail}"
        _verdicts[request.node.nodeid] = line
        print(line)
        assert ok, line

    return record


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_runs.append((report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_runs:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in _acceptance_runs:
        line = _verdicts.get(nodeid) or f"FAIL  {nodeid.split('::')[-1]}: raised before a verdict ({outcome})"
        terminalreporter.write_line(line)
