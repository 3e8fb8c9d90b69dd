import pytest

from besselmoments import PrecisionContext
from besselmoments.moments import attach_store

# filled by test_acceptance.py and printed at the end of the run
ACCEPTANCE_LINES: dict = {}


@pytest.fixture(autouse=True)
def _no_store():
    # tests never touch the user's cache directory
    attach_store(None)
    yield
    attach_store(None)


@pytest.fixture
def ctx20():
    return PrecisionContext(20)


@pytest.fixture
def ctx30():
    return PrecisionContext(30)


@pytest.fixture
def acceptance(capsys):
    """``record(key, criterion, ok, text)`` keeps one line per criterion."""
    def record(key, criterion, ok, text):
        line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {text}"
        ACCEPTANCE_LINES[key] = line
        with capsys.disabled():
            print("\n" + line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
