import numpy as np
import pytest

from tagqkd.qcore import RngStream, haar_su2


@pytest.fixture
def rng():
    return RngStream(20240601)


@pytest.fixture(scope="session")
def haar_samples():
    rng = RngStream(99, 1)
    return [haar_su2(rng) for _ in range(1000)]


def explicit_kron(a, b):
    """Tensor product written out entry by entry (independent of np.kron)."""
    out = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    out[2 * i + k, 2 * j + l] = a[i, j] * b[k, l]
    return out
