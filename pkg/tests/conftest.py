import numpy as np
import pytest

from qmodelid import DensityMatrix, Effect, ModelRepresentation, depolarizing, identity_map
from qmodelid.uniqueness import projection_set_pi, projection_set_qpt


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def lam01_model():
    """Qubit model whose smallest state/Choi eigenvalue is exactly 0.1 (from a state).

    Four states make it complete; the map is D_0.5, whose Choi min eigenvalue is 0.25.
    """
    def state(p, basis):
        return basis @ np.diag([1 - p, p]) @ basis.conj().T

    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    y = np.array([[1, 1], [1j, -1j]]) / np.sqrt(2)
    states = [state(0.1, np.eye(2)), state(0.2, np.eye(2)[:, ::-1]),
              state(0.15, h), state(0.3, y)]
    effects = [0.9 * DensityMatrix(s).mat + 0.05 * np.eye(2) for s in states]
    maps = [depolarizing(0.5, 2).as_map()]
    return ModelRepresentation(2, states, maps, effects, label="lam0.1")


@pytest.fixture
def trivial_model():
    return ModelRepresentation(2, [np.eye(2) / 2], [identity_map(2)], [np.eye(2) / 2])


def pi_model(dim, qpt=False, maps=()):
    pset = projection_set_qpt(dim) if qpt else projection_set_pi(dim)
    return ModelRepresentation(dim, [DensityMatrix(m, lab) for lab, m in pset], list(maps),
                               [Effect(m, lab) for lab, m in pset])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
