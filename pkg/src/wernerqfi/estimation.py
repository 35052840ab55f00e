"""Monte Carlo check of unbiased estimation against Cramér-Rao bounds.

A measurement is repeated ``n_shots`` times per trial on ρ(θ_true); each shot
outcome ``α`` is mapped through the locally unbiased estimator

    θ̂(α) = θ₀ + (∂p_α / p_α) / J_A

anchored at ``θ₀ = θ_true``, and the per-trial estimate is the shot average.
Its variance across ``n_trials`` trials is compared with ``1/(n J_A)`` and
``1/(n J)``.

Trial ``k`` draws from ``Philox(SeedSequence(seed, spawn_key=(k,)))``, so a
report depends only on its inputs, not on how trials are scheduled.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .ensembles import rng_for
from .errors import UninformativeMeasurementError, ValidationError
from .metrics import P_FLOOR, FisherReport, Povm, classical_fisher, cramer_rao_bound, fisher_report
from .werner import QuditSystem, WernerState, check_theta, derivative, density

# J_A below this is round-off from outcome derivatives that vanish exactly
FISHER_FLOOR = 1e-12


@dataclass(frozen=True)
class Estimator:
    anchor_theta: float
    values: dict
    fisher: float

    def table(self, labels) -> np.ndarray:
        return np.array([self.values[label] for label in labels])


@dataclass(frozen=True)
class EstimationReport:
    theta_true: float
    n_shots: int
    n_trials: int
    seed: int
    estimate_mean: float
    estimate_variance: float
    single_shot_variance: float
    classical_bound: float
    quantum_bound: float
    fisher: FisherReport

    def to_dict(self) -> dict:
        return asdict(self)


def build_estimator_from(povm: Povm, rho, drho, theta0: float) -> Estimator:
    j = classical_fisher(povm, rho, drho)
    if not j > FISHER_FLOOR:
        raise UninformativeMeasurementError(
            f"measurement is uninformative at θ = {theta0!r}: classical Fisher information {j:.3e} is zero up to round-off"
        )
    p = povm.probabilities(rho)
    dp = povm.derivatives(drho)
    # outcomes below the floor cannot occur; they keep the anchor value
    values = {}
    for label, pa, dpa in zip(povm.labels, p, dp):
        values[label] = float(theta0 + (dpa / pa) / j) if pa > P_FLOOR else float(theta0)
    return Estimator(float(theta0), values, j)


def build_estimator(povm: Povm, system: QuditSystem, theta0: float) -> Estimator:
    state = WernerState(system, theta0)
    return build_estimator_from(povm, state.rho, derivative(system), state.theta)


def single_shot_variance(estimator: Estimator, probabilities, labels) -> float:
    """Population variance ``Σ_α p_α (θ̂(α) − θ₀)²``."""
    dev = estimator.table(labels) - estimator.anchor_theta
    return float(np.dot(np.asarray(probabilities, dtype=float), dev * dev))


def _normalized(probabilities) -> np.ndarray:
    p = np.asarray(probabilities, dtype=float).ravel()
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise ValidationError("probabilities must be a non-empty finite vector")
    if np.any(p < 0):
        raise ValidationError(f"negative probability {p.min()!r}")
    total = p.sum()
    if abs(total - 1.0) > 1e-10:
        raise ValidationError(f"probabilities sum to {total!r}, not 1")
    return p / total


def sample_outcomes(probabilities, n_shots: int, seed) -> np.ndarray:
    """Outcome counts for ``n_shots`` draws, via inverse CDF in list order.

    ``seed`` may be an integer or a ready ``numpy.random.Generator``.
    """
    p = _normalized(probabilities)
    if int(n_shots) < 0:
        raise ValidationError("n_shots must be nonnegative")
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    u = rng_for(seed).random(int(n_shots))
    idx = np.searchsorted(cdf, u, side="right")
    return np.bincount(idx, minlength=p.size)


def run_experiment(
    system: QuditSystem,
    theta_true: float,
    povm: Povm,
    n_shots: int,
    n_trials: int,
    seed: int,
) -> EstimationReport:
    theta = check_theta(theta_true)
    if int(n_shots) < 1 or int(n_trials) < 1:
        raise ValidationError("n_shots and n_trials must be at least 1")
    n_shots, n_trials, seed = int(n_shots), int(n_trials), int(seed)
    rho = density(WernerState(system, theta))
    drho = derivative(system)
    estimator = build_estimator_from(povm, rho, drho, theta)
    p = povm.probabilities(rho)
    table = estimator.table(povm.labels)

    estimates = np.empty(n_trials)
    for k in range(n_trials):
        counts = sample_outcomes(p, n_shots, rng_for(seed, k))
        estimates[k] = np.dot(counts, table) / n_shots

    fisher = fisher_report(povm, rho, drho, theta)
    variance = float(np.var(estimates, ddof=1)) if n_trials > 1 else 0.0
    return EstimationReport(
        theta_true=theta,
        n_shots=n_shots,
        n_trials=n_trials,
        seed=seed,
        estimate_mean=float(np.mean(estimates)),
        estimate_variance=variance,
        single_shot_variance=single_shot_variance(estimator, p, povm.labels),
        classical_bound=cramer_rao_bound(estimator.fisher, n_shots),
        quantum_bound=cramer_rao_bound(fisher.quantum_sld, n_shots),
        fisher=fisher,
    )
