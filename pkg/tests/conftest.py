import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    def report(number: int, passed: bool, detail: str, soft: bool = False) -> None:
        status = "PASS" if passed else ("WARN" if soft else "FAIL")
        _ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {detail}")

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
