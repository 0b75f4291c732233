import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from honest_noise.channels import QuantumChannel

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_unitary(d, rng):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(d, rng, n_kraus=3):
    """Random CPTP map from a Stinespring isometry."""
    v = random_unitary(d * n_kraus, rng)[:, :d]
    return QuantumChannel(tuple(v[k * d:(k + 1) * d] for k in range(n_kraus)))


def random_hermitian(d, rng):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (z + z.conj().T) / 2


def random_density(d, rng, rank=None):
    z = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one verdict line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
