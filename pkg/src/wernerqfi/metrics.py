"""Fisher information, Cramér-Rao bounds and Uhlmann fidelity."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    IllPosedMeasurementError,
    ValidationError,
)
from .hermitian import HermitianOperator, as_hermitian, as_square, outer, trace_product
from .score import rld, sld
from .werner import QuditSystem, check_theta, ghz_vector, qfi_minimizer

P_FLOOR = 1e-15
DP_FLOOR = 1e-12
POVM_TOL = 1e-10


class Povm:
    """Ordered POVM ``{E_α}`` with outcome labels."""

    def __init__(self, elements: Sequence, labels: Sequence | None = None, tol: float = POVM_TOL):
        mats = [as_square(e.matrix if isinstance(e, HermitianOperator) else e) for e in elements]
        if not mats:
            raise ValidationError("a POVM needs at least one element")
        dim = mats[0].shape[0]
        if any(m.shape != (dim, dim) for m in mats):
            raise DimensionError("POVM elements have different dimensions")
        stack = np.stack(mats)
        asym = np.linalg.norm(stack - stack.conj().transpose(0, 2, 1), axis=(1, 2))
        if np.any(asym > 1e-10 * np.maximum(1.0, np.linalg.norm(stack, axis=(1, 2)))):
            raise ValidationError("POVM elements must be Hermitian")
        stack = 0.5 * (stack + stack.conj().transpose(0, 2, 1))
        labels = tuple(range(len(mats))) if labels is None else tuple(labels)
        if len(labels) != len(mats) or len(set(labels)) != len(labels):
            raise ValidationError("labels must be unique and match the number of elements")
        lowest = np.linalg.eigvalsh(stack)[:, 0]
        if np.any(lowest < -tol):
            k = int(np.argmin(lowest))
            raise ValidationError(f"POVM element {labels[k]!r} is not positive: min eigenvalue {lowest[k]:.3e}")
        defect = np.linalg.norm(stack.sum(axis=0) - np.eye(dim))
        if defect > tol:
            raise ValidationError(f"POVM elements do not sum to identity: ‖ΣE − I‖_F = {defect:.3e}")
        stack.flags.writeable = False
        self.stack = stack
        self.labels = labels
        self.dim = dim

    @property
    def elements(self) -> tuple[HermitianOperator, ...]:
        return tuple(HermitianOperator(m) for m in self.stack)

    def __len__(self) -> int:
        return self.stack.shape[0]

    def __repr__(self) -> str:
        return f"Povm(outcomes={len(self)}, dim={self.dim})"

    def _traces(self, op) -> np.ndarray:
        m = as_square(op)
        if m.shape != (self.dim, self.dim):
            raise DimensionError(f"operator is {m.shape}, POVM acts on dimension {self.dim}")
        return np.einsum("aij,ji->a", self.stack, m).real

    def probabilities(self, rho) -> np.ndarray:
        """``p_α = tr[E_α ρ]`` in label order."""
        return self._traces(rho)

    def derivatives(self, drho) -> np.ndarray:
        """``∂p_α = tr[E_α ∂ρ]`` in label order."""
        return self._traces(drho)


def projective_povm(vectors: np.ndarray, groups: Sequence[Sequence[int]] | None = None) -> Povm:
    """POVM from the columns of a unitary, optionally summed over ``groups``."""
    vectors = as_square(vectors)
    groups = [[k] for k in range(vectors.shape[1])] if groups is None else groups
    elements = [sum(outer(vectors[:, k]) for k in g) for g in groups]
    return Povm(elements)


def ghz_povm(system: QuditSystem) -> Povm:
    """Two outcomes ``{|Φ⟩⟨Φ|, I − |Φ⟩⟨Φ|}``; saturates the quantum bound on the family."""
    p = ghz_vector(system).projector()
    return Povm([p, np.eye(system.dim) - p], labels=("ghz", "rest"))


def computational_povm(dim: int) -> Povm:
    return projective_povm(np.eye(dim))


def trivial_povm(dim: int) -> Povm:
    return Povm([np.eye(dim)], labels=("sure",))


def random_povm(dim: int, rng: np.random.Generator, outcomes: int | None = None) -> Povm:
    """Projectors onto the columns of a Haar unitary.

    With ``outcomes = k`` the columns are shuffled and split into ``k``
    contiguous non-empty groups whose projectors are summed (coarse-graining).
    """
    from .ensembles import haar_unitary

    u = haar_unitary(dim, rng)
    if outcomes is None or outcomes >= dim:
        return projective_povm(u)
    if outcomes < 1:
        raise ValidationError("outcomes must be positive")
    order = rng.permutation(dim)
    cuts = np.sort(rng.choice(np.arange(1, dim), size=outcomes - 1, replace=False))
    return projective_povm(u, [list(g) for g in np.split(order, cuts)])


def qfi_sld(rho, drho) -> float:
    """``tr[ρ L²]`` with the symmetric logarithmic derivative."""
    L = sld(rho, drho).matrix
    return trace_product(rho, L @ L).real


def qfi_rld(rho, drho) -> float:
    """``tr[L† ρ L]`` with the right logarithmic derivative."""
    L = rld(rho, drho)
    return trace_product(L.conj().T, as_hermitian(rho).matrix @ L).real


def werner_qfi_closed_form(system: QuditSystem, theta):
    """``(D−1)/((1−θ)(1+(D−1)θ))``; a :class:`~fractions.Fraction` θ is evaluated exactly."""
    if isinstance(theta, Fraction):
        check_theta(theta)
        k = system.dim - 1
        return k / ((1 - theta) * (1 + k * theta))
    t = check_theta(theta)
    k = float(system.dim - 1)
    return k / ((1.0 - t) * (1.0 + k * t))


def werner_qfi_minimum(system: QuditSystem) -> float:
    """Minimum of the closed-form QFI over θ, ``4(D−1)²/D²``."""
    D = float(system.dim)
    return 4.0 * (D - 1.0) ** 2 / D**2


def classical_fisher(povm: Povm, rho, drho) -> float:
    """``Σ_α (∂p_α)²/p_α`` over outcomes above the probability floor.

    Outcomes with ``p_α ≤ 1e-15`` are skipped if ``|∂p_α| ≤ 1e-12`` and raise
    :class:`IllPosedMeasurementError` otherwise.
    """
    p = povm.probabilities(rho)
    dp = povm.derivatives(drho)
    total = 0.0
    for label, pa, dpa in zip(povm.labels, p, dp):
        if pa <= P_FLOOR:
            if abs(dpa) > DP_FLOOR:
                raise IllPosedMeasurementError(
                    f"outcome {label!r} has p = {pa:.3e} but dp/dθ = {dpa:.3e}; Fisher information diverges"
                )
            continue
        total += dpa * dpa / pa
    return float(total)


def cramer_rao_bound(fisher: float, n_samples: int = 1) -> float:
    """Variance lower bound ``1/(n J)`` for ``n`` independent repetitions."""
    if not fisher > 0:
        raise DomainError(f"Fisher information must be positive, got {fisher!r}")
    if int(n_samples) < 1:
        raise DomainError(f"n_samples must be at least 1, got {n_samples!r}")
    return 1.0 / (int(n_samples) * fisher)


@dataclass(frozen=True)
class FisherReport:
    theta: float
    quantum_sld: float
    quantum_rld: float
    classical: float
    cr_bound: float

    def to_dict(self) -> dict:
        return asdict(self)


def fisher_report(povm: Povm, rho, drho, theta: float) -> FisherReport:
    j = qfi_sld(rho, drho)
    return FisherReport(
        theta=float(theta),
        quantum_sld=j,
        quantum_rld=qfi_rld(rho, drho),
        classical=classical_fisher(povm, rho, drho),
        cr_bound=cramer_rao_bound(j),
    )


# --- fidelity ----------------------------------------------------------------


def _check_state(m: HermitianOperator, name: str, tol: float = 1e-10) -> None:
    if abs(m.trace() - 1.0) > tol:
        raise ValidationError(f"{name} must have unit trace, got {m.trace()!r}")
    if m.eigenvalues[0] < -tol:
        raise ValidationError(f"{name} is not positive semidefinite: min eigenvalue {m.eigenvalues[0]:.3e}")


def _psd_spectrum(w: np.ndarray) -> np.ndarray:
    # eigenvalues within round-off of zero (or slightly negative) are treated as exact zeros
    floor = max(w.size, 1) * np.finfo(float).eps * max(float(np.max(np.abs(w))), 1.0)
    return np.where(w <= floor, 0.0, w)


def _sqrt_psd(m: HermitianOperator) -> np.ndarray:
    w, v = m.eig.eigenvalues, m.eig.eigenvectors
    return (v * np.sqrt(_psd_spectrum(w))) @ v.conj().T


def pure_vector(sigma: HermitianOperator, tol: float = 1e-10) -> np.ndarray | None:
    """Unit vector ``φ`` if ``σ = |φ⟩⟨φ|`` within ``tol``, else ``None``."""
    w, v = sigma.eig.eigenvalues, sigma.eig.eigenvectors
    if abs(w[-1] - 1.0) > tol:
        return None
    return v[:, -1]


def fidelity(sigma, rho, method: str = "auto") -> float:
    """Uhlmann fidelity ``[tr (√σ ρ √σ)^{1/2}]²``.

    ``method="auto"`` takes the overlap ``⟨φ|ρ|φ⟩`` when σ is pure and the
    general spectral route otherwise; ``"general"`` and ``"pure"`` force one.
    """
    s, r = as_hermitian(sigma, tol=1e-10), as_hermitian(rho, tol=1e-10)
    if s.dim != r.dim:
        raise DimensionError("fidelity arguments have different dimensions")
    _check_state(s, "sigma")
    _check_state(r, "rho")
    if method not in ("auto", "general", "pure"):
        raise ValidationError(f"unknown fidelity method {method!r}")
    if method != "general":
        phi = pure_vector(s)
        if phi is not None:
            return float(np.clip(np.vdot(phi, r.matrix @ phi).real, 0.0, 1.0))
        if method == "pure":
            raise ValidationError("sigma is not a pure state")
    root = _sqrt_psd(s)
    inner = HermitianOperator(root @ r.matrix @ root, tol=1e-10)
    w = inner.eigenvalues
    if w[0] < -1e-12:
        raise ValidationError(f"√σ ρ √σ has eigenvalue {w[0]:.3e} below the clipping threshold")
    value = float(np.sum(np.sqrt(_psd_spectrum(w))) ** 2)
    return min(max(value, 0.0), 1.0)


def werner_fidelity_closed_form(system: QuditSystem, theta) -> float:
    """Fidelity of ρ(θ) with its GHZ target, ``(1 − θ + Dθ)/D``."""
    t = check_theta(theta)
    D = float(system.dim)
    return (1.0 + (D - 1.0) * t) / D


# --- numerical minimization --------------------------------------------------

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12, max_iter: int = 400) -> float:
    """Argmin of a unimodal ``f`` on ``[lo, hi]``."""
    if not lo < hi:
        raise ValidationError("golden_section needs lo < hi")
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def numerical_qfi_minimizer(system: QuditSystem, upper: float = 1.0 - 1e-6) -> float:
    """Golden-section argmin of the closed-form QFI on ``[0, upper]``.

    Near the minimum float64 values of the objective differ by a few ulp
    over ~1e-8 in θ, so comparisons are made in exact rational arithmetic.
    """
    return golden_section(lambda t: werner_qfi_closed_form(system, Fraction(t)), 0.0, upper)


def fidelity_at_minimizer(system: QuditSystem) -> float:
    return werner_fidelity_closed_form(system, qfi_minimizer(system))
