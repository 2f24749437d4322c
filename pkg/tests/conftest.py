import numpy as np
import pytest


def naive_dft(x, inverse=False):
    """O(M^2) reference transform with the library's normalisation."""
    x = np.asarray(x, dtype=np.complex128)
    m = x.shape[-1]
    n = np.arange(m)
    sign = 1 if inverse else -1
    W = np.exp(sign * 2j * np.pi * np.outer(n, n) / m)
    out = x @ W.T
    return out / m if inverse else out


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.linalg.norm(b), 1e-300)
    return np.linalg.norm(a - b) / scale


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
