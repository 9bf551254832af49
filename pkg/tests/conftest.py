import numpy as np
import pytest

from twoway_teleport.statevec import PureState


def random_state(labels, rng) -> PureState:
    n = len(labels)
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return PureState(tuple(labels), v / np.linalg.norm(v))


def random_density(dim, rng, rank=None) -> np.ndarray:
    rank = dim if rank is None else rank
    m = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
