from functools import reduce

import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def kron_all(mats):
    return reduce(np.kron, mats)


def kron_pauli(alpha, beta):
    """Oracle: X^alpha Z^beta from explicit Kronecker products of 2x2 matrices."""
    x = kron_all([SX if a else I2 for a in alpha])
    z = kron_all([SZ if b else I2 for b in beta])
    return x @ z


def bits(value, n):
    return tuple((value >> (n - 1 - i)) & 1 for i in range(n))


def all_keys(n):
    return [(bits(a, n), bits(b, n)) for a in range(2**n) for b in range(2**n)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
