import numpy as np
import pytest
from hypothesis import strategies as st

from cqec.code import LogicalState


def random_density(rng, dim=8, rank=None):
    rank = rank or dim
    G = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho)


def random_pure(rng, dim=8):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


seeds = st.integers(min_value=0, max_value=2**32 - 1)
pauli_labels = st.text(alphabet="IXYZ", min_size=3, max_size=3)


@st.composite
def logical_states(draw):
    theta = draw(st.floats(0, np.pi))
    phi = draw(st.floats(0, 2 * np.pi))
    return LogicalState(np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# acceptance bookkeeping: criterion number -> (passed, description)
ACCEPTANCE = {}
# invariant diagnostics collected from every integration run in the acceptance suite
INVARIANTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {text}")
