import numpy as np
import pytest

from QCatLab.dissipator import BlockDensity
from QCatLab.spin import SpinQuantum


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def spin10():
    """Spin j = 10"""
    return SpinQuantum(20)


@pytest.fixture
def random_density(rng):
    """Factory of random complex block densities with entries of order one"""
    def _make(spin: SpinQuantum) -> BlockDensity:
        matrix = (rng.standard_normal((spin.dim, spin.dim))
                  + 1j * rng.standard_normal((spin.dim, spin.dim)))
        return BlockDensity.from_matrix(matrix / np.max(np.abs(matrix)), spin)
    return _make
