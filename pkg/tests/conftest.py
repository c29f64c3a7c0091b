import pytest

from qsync import SystemParams

_ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(label, ok, detail):
        _ACCEPTANCE_LINES.append(f"{label}: {'PASS' if ok else 'FAIL'}  {detail}")
        print(_ACCEPTANCE_LINES[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def example_params():
    return SystemParams(eps_a=2.0, delta_a=0.0, eps_b=1.0, delta_b=0.5, coupling=0.5)


@pytest.fixture
def in_regime_params():
    """Synchronisable and well inside the RWA regime at (n, l) = (1, 1)."""
    return SystemParams(eps_a=1.0, delta_a=0.0, eps_b=5.0, delta_b=1.0, coupling=0.02)
