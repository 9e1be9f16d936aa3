import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def report(capsys):
    """Record one PASS/FAIL line for an acceptance criterion and print it."""
    def emit(number, title, passed, detail):
        line = f"[{number:2d}] {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append((number, line))
        with capsys.disabled():
            print("\n" + line)
        return passed
    return emit


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
