"""Seeded random matrices for property tests and bound checks."""

from __future__ import annotations

import numpy as np


def rng_for(seed, *stream) -> np.random.Generator:
    """Philox generator for ``(seed, *stream)``.

    The stream tuple becomes the ``SeedSequence`` spawn key, so
    ``rng_for(s, k)`` equals the ``k``-th child of ``SeedSequence(s).spawn``.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    seq = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(seq))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (z + z.conj().T)


def random_density(dim: int, rng: np.random.Generator, spread: float = 3.0) -> np.ndarray:
    """Full-rank density matrix with eigenvalue ratio at most ``spread``."""
    u = haar_unitary(dim, rng)
    w = rng.uniform(1.0, spread, size=dim)
    w /= w.sum()
    return (u * w) @ u.conj().T


def random_traceless_hermitian(dim: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    h = random_hermitian(dim, rng)
    h -= np.trace(h).real / dim * np.eye(dim)
    return norm * h / np.linalg.norm(h)


def random_noncommuting_pair(dim: int, rng: np.random.Generator, spread: float = 3.0, norm: float = 0.2):
    """``(ρ, ∂ρ)`` with ρ full rank and ∂ρ traceless, generically non-commuting."""
    return random_density(dim, rng, spread), random_traceless_hermitian(dim, rng, norm)
