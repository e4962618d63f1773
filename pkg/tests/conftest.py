import numpy as np
import pytest

from quanv3d import G3Spec, sample_g3


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_g3(qubits: int, gates: int, seed: int = 0):
    return sample_g3(G3Spec(qubits, gates, seed))


def random_state(qubits: int, seed: int = 0) -> np.ndarray:
    g = np.random.default_rng(seed)
    psi = g.normal(size=2**qubits) + 1j * g.normal(size=2**qubits)
    return psi / np.linalg.norm(psi)
