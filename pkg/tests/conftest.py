import numpy as np
import pytest

from qsl.core import QuantumState, spectral_decompose


def random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (a + a.conj().T)


def random_state(rng, d):
    return QuantumState.from_vector(rng.standard_normal(d) + 1j * rng.standard_normal(d))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def random_pairs():
    """100 seeded (system, state) pairs with dimensions 2..8."""
    gen = np.random.default_rng(7)
    out = []
    for _ in range(100):
        d = int(gen.integers(2, 9))
        out.append((spectral_decompose(random_hermitian(gen, d)), random_state(gen, d)))
    return out


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
