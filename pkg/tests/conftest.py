import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_matrix(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def random_density(rng, n):
    a = random_matrix(rng, n)
    rho = a @ a.conj().T
    return rho / np.trace(rho)
