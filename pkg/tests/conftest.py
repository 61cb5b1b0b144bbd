import numpy as np
import pytest

from qbath.oscillator import OscillatorModel


def pytest_terminal_summary(terminalreporter):
    """Echo the one-line-per-criterion acceptance report after the run."""
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def model():
    """Reference parameters: hbar = kB = T = m = w = 1, beta_p = beta_q = 0.2, 16 levels."""
    return OscillatorModel()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (a + a.conj().T)


def random_density(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
