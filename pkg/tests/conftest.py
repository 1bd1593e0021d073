import pytest

_ACCEPTANCE = []


@pytest.fixture
def record():
    """Store one acceptance line; printed at the end of the run."""

    def _record(key, name, passed, detail=""):
        _ACCEPTANCE.append((key, name, bool(passed), detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key, name, passed, detail in sorted(_ACCEPTANCE, key=lambda row: row[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{key}] {status}  {name}  {detail}")
