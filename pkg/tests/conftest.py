import numpy as np
import pytest

# frozen from 40-digit mpmath roots of e - 1/e = d and e + 1/e = d
PHI = 1.6180339887498949
SHIFT_1 = PHI
SHIFT_2 = 2.414213562373095      # e - 1/e = 2
SHIFT_3 = 3.3027756377319946     # e - 1/e = 3
SUM_4 = 3.7320508075688772       # e + 1/e = 4


@pytest.fixture
def rng():
    return np.random.default_rng(20190402)


def rel(X, M):
    return np.linalg.norm(X - M) / max(np.linalg.norm(M), 1.0)


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""
    def record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
