import numpy as np
import pytest
from hypothesis import settings

from qdcnot.statevec import Kind, QuantumState, RegisterLayout

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("fast", max_examples=20, deadline=None)
settings.load_profile("ci")

TWO_SPINS = RegisterLayout.of(Kind.SPIN, Kind.SPIN)

# Acceptance results, printed as one line per criterion in the terminal summary.
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def random_state(rng: np.random.Generator, layout: RegisterLayout) -> QuantumState:
    v = rng.normal(size=layout.dim) + 1j * rng.normal(size=layout.dim)
    return QuantumState(layout, v / np.linalg.norm(v))


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(h)
    return v @ np.diag(np.exp(1j * w)) @ v.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}")
