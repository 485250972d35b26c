import pytest

CRITERIA = range(1, 12)
_results: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one acceptance line; the summary hook prints them all at the end of the run."""
    def _record(n: int, ok: bool, detail: str) -> None:
        _results[n] = (ok, detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in CRITERIA:
        ok, detail = _results.get(n, (False, "(not run or crashed before reporting)"))
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
