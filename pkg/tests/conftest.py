import numpy as np
import pytest

from cohnonlocal.qstate import DensityMatrix, PureState


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def ket(*amps, dims=None):
    return PureState.normalized(amps, dims)


def qubit(p0, r01):
    return DensityMatrix([[p0, r01], [np.conj(r01), 1 - p0]])
