import numpy as np
import pytest

_VERDICTS: dict[int, str] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def verdict():
    """Record a one-line acceptance verdict; printed in the terminal summary."""

    def record(number: int, passed: bool, detail: str) -> None:
        _VERDICTS[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        terminalreporter.write_line(_VERDICTS[number])
