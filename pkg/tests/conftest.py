import numpy as np
import pytest

from equitrack.lie import hat
from equitrack.semidirect import InputPair, PhaseState
from equitrack.verify import random_inertia, random_input, random_state

SEED = 1234


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def series_expm(A, terms=30):
    """Truncated power series of the matrix exponential, used as an oracle."""
    out = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


def assert_state_close(a: PhaseState, b: PhaseState, atol=1e-12):
    np.testing.assert_allclose(a.Q, b.Q, atol=atol, rtol=0)
    np.testing.assert_allclose(a.P, b.P, atol=atol, rtol=0)


def assert_input_close(a: InputPair, b: InputPair, atol=1e-12):
    np.testing.assert_allclose(a.U, b.U, atol=atol, rtol=0)
    np.testing.assert_allclose(a.tau, b.tau, atol=atol, rtol=0)


__all__ = [
    "assert_input_close",
    "assert_state_close",
    "hat",
    "random_inertia",
    "random_input",
    "random_state",
    "series_expm",
]
