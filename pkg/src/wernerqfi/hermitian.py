"""Dense complex Hermitian linear algebra.

Everything downstream works with :class:`HermitianOperator` (validated,
symmetrized, read-only, with a cached eigendecomposition) and plain complex
``numpy`` arrays for operators that need not be Hermitian.

Composite indices follow the left-to-right tensor order: the first factor of
a Kronecker product is the most significant digit.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import CapacityError, DimensionError, DomainError, ValidationError

DEFAULT_DENSE_CAP = 1024
DENSE_CAP_ENV = "WERNERQFI_DENSE_CAP"
HERMITICITY_TOL = 1e-12


def dense_cap(override: int | None = None) -> int:
    """Largest dimension for which dense matrices may be built.

    ``override`` wins, then the ``WERNERQFI_DENSE_CAP`` environment variable,
    then :data:`DEFAULT_DENSE_CAP`.
    """
    if override is not None:
        cap = int(override)
    else:
        raw = os.environ.get(DENSE_CAP_ENV)
        cap = int(raw) if raw else DEFAULT_DENSE_CAP
    if cap < 1:
        raise ValidationError(f"dense cap must be positive, got {cap}")
    return cap


def check_dense(dim: int, cap: int | None = None) -> None:
    limit = dense_cap(cap)
    if dim > limit:
        raise CapacityError(
            f"dimension {dim} exceeds the dense cap {limit}; use the closed-form "
            f"functions instead or raise the cap via {DENSE_CAP_ENV}"
        )


def as_square(a) -> np.ndarray:
    """Return ``a`` as a 2-D complex array, raising if it is not square."""
    m = np.asarray(a.matrix if isinstance(a, HermitianOperator) else a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


class HermitianOperator:
    """Immutable dense Hermitian matrix.

    The input is checked against ``‖M − M†‖_F ≤ tol · max(1, ‖M‖_F)`` and then
    replaced by ``(M + M†)/2`` so that round-off asymmetry never reaches the
    eigensolver.
    """

    def __init__(self, matrix, tol: float = HERMITICITY_TOL):
        m = as_square(matrix)
        if tol < 0:
            raise ValidationError("hermiticity tolerance must be nonnegative")
        asym = np.linalg.norm(m - m.conj().T)
        if asym > tol * max(1.0, np.linalg.norm(m)):
            raise ValidationError(f"matrix is not Hermitian: ‖M − M†‖_F = {asym:.3e}")
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        self.matrix = m
        self.hermiticity_tol = tol

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eig(self) -> EigenDecomposition:
        w, v = np.linalg.eigh(self.matrix)
        w.flags.writeable = False
        v.flags.writeable = False
        return EigenDecomposition(w, v)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig.eigenvalues

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix.copy() if copy else self.matrix
        return self.matrix.astype(dtype)

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


def as_hermitian(a, tol: float = HERMITICITY_TOL) -> HermitianOperator:
    return a if isinstance(a, HermitianOperator) else HermitianOperator(a, tol)


def kron(a, b) -> np.ndarray:
    """Kronecker product with ``a`` as the most significant factor."""
    return np.kron(as_square(a), as_square(b))


def kron_all(factors) -> np.ndarray:
    factors = list(factors)
    if not factors:
        raise DimensionError("kron_all needs at least one factor")
    out = as_square(factors[0])
    for f in factors[1:]:
        out = kron(out, f)
    return out


def eigh(h) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending."""
    return as_hermitian(h).eig


def spectral_function(
    h,
    f: Callable[[np.ndarray], np.ndarray],
    domain: Callable[[float], bool] | None = None,
) -> HermitianOperator:
    """Apply a real function to the spectrum: ``V f(Λ) V†``.

    ``f`` receives the eigenvalue array. An eigenvalue failing ``domain`` or
    mapping to a non-finite value raises :class:`DomainError` naming it.
    """
    op = as_hermitian(h)
    w, v = op.eig.eigenvalues, op.eig.eigenvectors
    if domain is not None:
        for lam in w:
            if not domain(float(lam)):
                raise DomainError(f"eigenvalue {lam!r} lies outside the domain of {_name(f)}")
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if fw.shape != w.shape:
        raise ValidationError(f"{_name(f)} must map the eigenvalue array elementwise")
    bad = ~np.isfinite(fw)
    if bad.any():
        lam = w[np.argmax(bad)]
        raise DomainError(f"eigenvalue {lam!r} lies outside the domain of {_name(f)}")
    return HermitianOperator((v * fw) @ v.conj().T)


def _name(f) -> str:
    return getattr(f, "__name__", repr(f))


def trace_product(a, b) -> complex:
    """``tr(a b)`` without forming the product."""
    ma, mb = as_square(a), as_square(b)
    if ma.shape != mb.shape:
        raise DimensionError(f"dimension mismatch {ma.shape} vs {mb.shape}")
    return complex(np.einsum("ij,ji->", ma, mb))


def commutator(a, b) -> np.ndarray:
    ma, mb = as_square(a), as_square(b)
    return ma @ mb - mb @ ma


def frobenius(a) -> float:
    return float(np.linalg.norm(np.asarray(a.matrix if isinstance(a, HermitianOperator) else a)))


def outer(vec) -> np.ndarray:
    """Projector ``|v⟩⟨v|`` for a column vector given as a 1-D array."""
    v = np.asarray(vec, dtype=complex).ravel()
    return np.outer(v, v.conj())


def min_eigenvalue(h) -> float:
    return float(as_hermitian(h).eigenvalues[0])


def require_positive_definite(h, name: str = "rho") -> HermitianOperator:
    op = as_hermitian(h)
    lam = min_eigenvalue(op)
    if lam <= 0:
        raise DomainError(f"{name} must be positive definite; minimum eigenvalue is {lam!r}")
    return op
