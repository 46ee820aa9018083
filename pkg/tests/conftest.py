import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    """Collects one PASS/FAIL line per acceptance criterion for the run summary."""
    def log(line: str) -> None:
        print(line)
        _ACCEPTANCE_LINES.append(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
