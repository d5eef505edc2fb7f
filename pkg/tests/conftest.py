import numpy as np
import pytest

from subqfi import core

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return core.make_rng(20240611)


@pytest.fixture
def acceptance_log():
    def log(number: int, name: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {name:<34} {detail}"
        _ACCEPTANCE.append(line)
        print(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


def assert_close(a, b, atol=0.0, rtol=0.0):
    np.testing.assert_allclose(a, b, atol=atol, rtol=rtol)
