import pytest

from sagp import _backend


@pytest.fixture(params=_backend.available())
def each_backend(request):
    """Run the requesting test once per importable kernel backend."""
    before = _backend.current()
    _backend.use(request.param)
    yield request.param
    _backend.use(before)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
