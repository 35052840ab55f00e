import numpy as np
import pytest

from wernerqfi.werner import QuditSystem

# every (d, N) grid point with D <= 256 used by the dense checks
DENSE_GRID = [QuditSystem(d, n) for d in (2, 3, 4) for n in (2, 3)]
THETAS = [round(0.05 * k, 2) for k in range(1, 20)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, dim):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (z + z.conj().T)


def random_pd(rng, dim, floor=0.1):
    """Positive-definite, unit-trace matrix with smallest eigenvalue >= floor/dim."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(z)
    w = floor + rng.random(dim)
    w /= w.sum()
    return (q * w) @ q.conj().T


NONCOMMUTING_RHO = np.array([[0.6, 0.1], [0.1, 0.4]])
NONCOMMUTING_DRHO = np.array([[0.2, 0.3], [0.3, -0.2]])
