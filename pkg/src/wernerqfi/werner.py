"""Werner-type N-qudit states.

``ρ(θ) = (1−θ)/D · I + θ |Φ⟩⟨Φ|`` with ``|Φ⟩`` the GHZ vector
``(1/√d) Σ_m |m⟩⊗…⊗|m⟩`` and ``D = d^N``. The two-qubit Werner state is the
``d = N = 2`` member.

Closed-form quantities (spectrum, inverse coefficients, thresholds) are valid
for any dimension that fits in a signed 64-bit integer; functions returning
dense matrices enforce the dense cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError, ParameterError, ValidationError
from .hermitian import HermitianOperator, check_dense, outer

INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class QuditSystem:
    """``n`` particles with ``d`` levels each."""

    d: int
    n: int

    def __post_init__(self):
        for name in ("d", "n"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ValidationError(f"{name} must be an integer, got {value!r}")
            if value < 2:
                raise ValidationError(f"{name} must be at least 2, got {value}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "n", int(self.n))
        if self.n * math.log2(self.d) > 64 or self.d**self.n > INT64_MAX:
            raise CapacityError(f"dimension {self.d}^{self.n} does not fit in 64 bits")

    @property
    def dim(self) -> int:
        return self.d**self.n


@dataclass(frozen=True)
class StateVector:
    system: QuditSystem
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amps.size != self.system.dim:
            raise ValidationError(f"expected {self.system.dim} amplitudes, got {amps.size}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"state vector not normalized: Σ|a|² = {norm!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def projector(self) -> np.ndarray:
        return outer(self.amplitudes)


def check_theta(theta) -> float:
    t = float(theta)
    if not (0.0 <= t < 1.0):
        raise ParameterError(f"theta must lie in [0, 1), got {theta!r}")
    return t


@dataclass(frozen=True)
class WernerState:
    system: QuditSystem
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", check_theta(self.theta))

    @cached_property
    def rho(self) -> HermitianOperator:
        """Dense density matrix, built on first access."""
        return density(self)


@dataclass(frozen=True)
class WernerSpectrum:
    """Eigenvalues of ρ(θ): ``bulk`` (multiplicity D−1) and ``top`` (multiplicity 1)."""

    bulk_eigenvalue: float
    top_eigenvalue: float
    dim: int

    def eigenvalues(self) -> np.ndarray:
        """All D eigenvalues in ascending order."""
        return np.concatenate([np.full(self.dim - 1, self.bulk_eigenvalue), [self.top_eigenvalue]])


def ghz_indices(system: QuditSystem) -> np.ndarray:
    """Composite indices whose base-d digits are all equal: m·(d^{N−1}+…+d+1)."""
    repunit = sum(system.d**k for k in range(system.n))
    return np.arange(system.d, dtype=np.int64) * repunit


def ghz_vector(system: QuditSystem, cap: int | None = None) -> StateVector:
    check_dense(system.dim, cap)
    amps = np.zeros(system.dim, dtype=complex)
    amps[ghz_indices(system)] = 1.0 / math.sqrt(system.d)
    return StateVector(system, amps)


def ghz_projector(system: QuditSystem, cap: int | None = None) -> HermitianOperator:
    return HermitianOperator(ghz_vector(system, cap).projector())


def density(state: WernerState, cap: int | None = None) -> HermitianOperator:
    D = state.system.dim
    check_dense(D, cap)
    rho = state.theta * ghz_vector(state.system, cap).projector()
    rho[np.diag_indices(D)] += (1.0 - state.theta) / D
    return HermitianOperator(rho)


def derivative(system: QuditSystem, cap: int | None = None) -> HermitianOperator:
    """∂ρ/∂θ = −I/D + |Φ⟩⟨Φ|, independent of θ."""
    D = system.dim
    check_dense(D, cap)
    drho = ghz_vector(system, cap).projector()
    drho[np.diag_indices(D)] -= 1.0 / D
    return HermitianOperator(drho)


def inverse_coefficients(state: WernerState) -> tuple[float, float]:
    """``(a, b)`` with ρ⁻¹ = a·I + b·|Φ⟩⟨Φ|."""
    D = float(state.system.dim)
    t = state.theta
    a = D / (1.0 - t)
    b = -(D * D) * t / ((1.0 - t) * (1.0 + (D - 1.0) * t))
    return a, b


def inverse(state: WernerState, cap: int | None = None) -> HermitianOperator:
    D = state.system.dim
    check_dense(D, cap)
    a, b = inverse_coefficients(state)
    inv = b * ghz_vector(state.system, cap).projector()
    inv[np.diag_indices(D)] += a
    return HermitianOperator(inv)


def werner_spectrum(state: WernerState) -> WernerSpectrum:
    D = state.system.dim
    bulk = (1.0 - state.theta) / D
    return WernerSpectrum(bulk, bulk + state.theta, D)


def separability_threshold(system: QuditSystem) -> float:
    """Mixing parameter below which the state is separable: 1/(1 + d^{N−1})."""
    return 1.0 / (1.0 + system.d ** (system.n - 1))


def qfi_minimizer(system: QuditSystem) -> float:
    """Argmin over θ of the quantum Fisher information: (D−2)/(2(D−1))."""
    D = system.dim
    return (D - 2) / (2 * (D - 1))


def is_entangled(system: QuditSystem, theta: float) -> bool:
    return check_theta(theta) > separability_threshold(system)
