import pytest

_RESULTS = pytest.StashKey[dict]()
CRITERIA = range(1, 10)


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def record(request):
    """Store one acceptance line: record(criterion, passed, detail)."""
    results = request.config.stash[_RESULTS]

    def _record(criterion, passed, detail):
        results[criterion] = (bool(passed), detail)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in CRITERIA:
        passed, detail = results.get(k, (False, "not run or raised before reporting"))
        terminalreporter.write_line(f"criterion {k}: {'PASS' if passed else 'FAIL'}  {detail}")
