import numpy as np
import pytest

from smoothgn.problems import QuantileProblem


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


@pytest.fixture
def quantile_exact():
    """Quantile problem whose moment equation has an exact root interval."""
    x = np.random.default_rng(7).standard_normal(250)
    return QuantileProblem(x, 0.7)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def report():
    """Record a one-line PASS/FAIL verdict for an acceptance criterion, then assert it."""
    def _report(label: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: s.split()[1]):
            terminalreporter.write_line(line)
