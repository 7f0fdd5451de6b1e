import math

import numpy as np
import pytest

from transport.ergotropy import Hamiltonian
from transport.sampling import RngStream


@pytest.fixture
def qubit_h():
    """H = diag(0, 1)"""
    return Hamiltonian.diagonal([0.0, 1.0])


@pytest.fixture
def rng():
    return RngStream(master_seed=1234)


@pytest.fixture
def np_rng():
    return np.random.default_rng(2024)


@pytest.fixture
def random_hermitian(np_rng):
    def make(d):
        g = np_rng.normal(size=(d, d)) + 1j * np_rng.normal(size=(d, d))
        return (g + g.conj().T) / 2
    return make


@pytest.fixture
def kappa():
    return math.pi / 8
