import pytest

# criterion number -> (passed, detail); filled in by test_acceptance.py
CRITERIA: dict[int, tuple[bool, str]] = {}


def record(number: int, passed: bool, detail: str = "") -> None:
    CRITERIA[number] = (passed, detail)


@pytest.fixture
def criterion():
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
