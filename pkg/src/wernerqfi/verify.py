"""Self-verification suite behind ``wernerqfi verify``.

Each check compares a dense or Monte Carlo computation with the closed form
it is meant to reproduce and reports the worst residual against a fixed
tolerance. ``fast=True`` thins the grids; ``tolerance`` replaces every
tolerance (useful for exercising the failure path).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Callable, Iterator

import numpy as np
from scipy.linalg import logm

from .ensembles import random_noncommuting_pair, rng_for
from .estimation import build_estimator, run_experiment, single_shot_variance
from .metrics import (
    classical_fisher,
    fidelity,
    ghz_povm,
    numerical_qfi_minimizer,
    qfi_sld,
    random_povm,
    werner_fidelity_closed_form,
    werner_qfi_closed_form,
    werner_qfi_minimum,
)
from .score import defining_residuals, exact_score_quadrature, exact_score_spectral, rld, sld
from .werner import (
    QuditSystem,
    WernerState,
    derivative,
    density,
    ghz_projector,
    qfi_minimizer,
    separability_threshold,
)

THETA_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))
FAST_THETA_GRID = (0.05, 0.5, 0.95)
DENSE_SYSTEMS = tuple(QuditSystem(d, n) for d in (2, 3, 4) for n in (2, 3))
MINIMIZER_SYSTEMS = tuple(QuditSystem(d, n) for d in range(2, 6) for n in range(2, 6) if d**n <= 1024)
UNIVERSALITY_MAX_DIM = 10**12


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    relation: str
    measured: float
    tolerance: float
    comparison: str = "<="
    detail: str = ""

    @property
    def passed(self) -> bool:
        if self.comparison == ">":
            return bool(self.measured > self.tolerance)
        if self.comparison == "==":
            return bool(self.measured == self.tolerance)
        return bool(self.measured <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] C{self.criterion} {self.name}: {self.relation} | "
            f"measured {self.measured:.3e} {self.comparison} {self.tolerance:.3e}"
            + (f" ({self.detail})" if self.detail else "")
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


class _Suite:
    def __init__(self, fast: bool, tolerance: float | None):
        self.fast = fast
        self.override = tolerance
        self.thetas = FAST_THETA_GRID if fast else THETA_GRID

    def result(self, criterion, name, relation, measured, tolerance, comparison="<=", detail=""):
        tol = tolerance if self.override is None else self.override
        return CheckResult(criterion, name, relation, float(measured), float(tol), comparison, detail)

    def werner_points(self):
        for system in DENSE_SYSTEMS:
            drho = derivative(system)
            for theta in self.thetas:
                yield system, theta, density(WernerState(system, theta)), drho


def check_qfi_closed_form(s: _Suite) -> Iterator[CheckResult]:
    worst, where = 0.0, ""
    for system, theta, rho, drho in s.werner_points():
        closed = werner_qfi_closed_form(system, theta)
        err = abs(qfi_sld(rho, drho) - closed) / closed
        if err >= worst:
            worst, where = err, f"d={system.d} N={system.n} θ={theta}"
    yield s.result(1, "qfi-closed-form", "tr[ρL²] = (D−1)/((1−θ)(1+(D−1)θ)), relative", worst, 1e-10, detail=where)


def check_minimizer(s: _Suite) -> Iterator[CheckResult]:
    arg_err = max(abs(numerical_qfi_minimizer(sys) - qfi_minimizer(sys)) for sys in MINIMIZER_SYSTEMS)
    yield s.result(2, "qfi-argmin", "golden-section argmin J = (D−2)/(2(D−1))", arg_err, 1e-8)
    val_err = max(
        abs(werner_qfi_closed_form(sys, qfi_minimizer(sys)) - werner_qfi_minimum(sys)) for sys in MINIMIZER_SYSTEMS
    )
    yield s.result(2, "qfi-minimum-value", "min J = 4(D−1)²/D²", val_err, 1e-10)


def check_two_qubit_coincidence(s: _Suite) -> Iterator[CheckResult]:
    two = QuditSystem(2, 2)
    diff = abs(qfi_minimizer(two) - separability_threshold(two))
    third = abs(qfi_minimizer(two) - 1.0 / 3.0)
    yield s.result(3, "two-qubit-coincidence", "θ_min = θ* = 1/3 at d=N=2", max(diff, third), 0.0, "==")
    gaps = [qfi_minimizer(sys) - separability_threshold(sys) for sys in MINIMIZER_SYSTEMS if sys != two]
    yield s.result(3, "entangled-minimizer", "θ_min − 1/(1+d^{N−1}) > 0 for (d,N) ≠ (2,2)", min(gaps), 0.0, ">")


def _universality_systems() -> Iterator[QuditSystem]:
    n = 2
    while 2**n <= UNIVERSALITY_MAX_DIM:
        d = 2
        while d**n <= UNIVERSALITY_MAX_DIM:
            yield QuditSystem(d, n)
            d += 1
        n += 1


def check_universality(s: _Suite) -> Iterator[CheckResult]:
    if s.fast:
        systems = [QuditSystem(d, n) for d in (2, 3, 10, 1000, 10**6) for n in (2, 3, 4, 40) if d**n <= 10**12]
    else:
        systems = _universality_systems()
    worst, count = 0.0, 0
    for sys in systems:
        worst = max(worst, abs(werner_fidelity_closed_form(sys, qfi_minimizer(sys)) - 0.5))
        count += 1
    yield s.result(
        4, "universal-fidelity-closed", "F(θ_min) = 1/2, closed form, D ≤ 1e12", worst, 1e-12, detail=f"{count} systems"
    )
    dense = 0.0
    for sys in DENSE_SYSTEMS:
        rho = density(WernerState(sys, qfi_minimizer(sys)))
        dense = max(dense, abs(fidelity(ghz_projector(sys), rho, method="general") - 0.5))
    yield s.result(4, "universal-fidelity-dense", "Uhlmann F(|Φ⟩⟨Φ|, ρ(θ_min)) = 1/2, D ≤ 256", dense, 1e-10)


def check_fidelity_closed_form(s: _Suite) -> Iterator[CheckResult]:
    worst = 0.0
    for system, theta, rho, _ in s.werner_points():
        f = fidelity(ghz_projector(system), rho, method="general")
        worst = max(worst, abs(f - werner_fidelity_closed_form(system, theta)))
    yield s.result(5, "fidelity-closed-form", "Uhlmann F = (1−θ+Dθ)/D", worst, 1e-10)
    exact = max(abs(werner_fidelity_closed_form(sys, 0.0) - 1.0 / sys.dim) for sys in DENSE_SYSTEMS)
    dense0 = max(
        abs(fidelity(ghz_projector(sys), density(WernerState(sys, 0.0)), method="general") - 1.0 / sys.dim)
        for sys in DENSE_SYSTEMS
    )
    yield s.result(5, "fidelity-at-zero", "F(θ=0) = 1/D (closed form exact)", exact, 0.0, "==")
    yield s.result(5, "fidelity-at-zero-dense", "Uhlmann F(θ=0) = 1/D", dense0, 1e-10)


def check_score_coincidence(s: _Suite) -> Iterator[CheckResult]:
    trio, quad = 0.0, 0.0
    for _, _, rho, drho in s.werner_points():
        scores = {
            "sld": sld(rho, drho).matrix,
            "rld": rld(rho, drho),
            "spectral": exact_score_spectral(rho, drho).matrix,
        }
        for a, b in combinations(scores, 2):
            trio = max(trio, np.linalg.norm(scores[a] - scores[b]))
        q = exact_score_quadrature(rho, drho).matrix
        quad = max(quad, max(np.linalg.norm(q - m) for m in scores.values()))
    yield s.result(6, "werner-score-trio", "L_S = L_R = ∂ln ρ on commuting family", trio, 1e-10)
    yield s.result(6, "werner-score-quadrature", "double-integral score = other scores", quad, 1e-6)

    count = 10 if s.fast else 50
    relation, match = 0.0, 0.0
    for k in range(count):
        rng = rng_for(2024, k)
        rho, drho = random_noncommuting_pair(int(rng.integers(2, 9)), rng)
        res = defining_residuals(rho, drho)
        relation = max(relation, res["sld"], res["rld"])
        spectral = exact_score_spectral(rho, drho).matrix
        match = max(match, np.linalg.norm(exact_score_quadrature(rho, drho).matrix - spectral))
    yield s.result(
        6, "random-defining-relations", "(ρL+Lρ)/2 = ∂ρ and ρL = ∂ρ, relative", relation, 1e-10, detail=f"{count} instances"
    )
    yield s.result(6, "random-quadrature", "double-integral score = divided-difference score", match, 1e-6)


def check_measurement_bound(s: _Suite) -> Iterator[CheckResult]:
    per_point = 5 if s.fast else 50
    margin, saturation = -np.inf, 0.0
    for system in DENSE_SYSTEMS:
        D = system.dim
        povms = []
        for k in range(per_point):
            rng = rng_for(7, D, k)
            # every other POVM is coarse-grained to a random number of outcomes
            outcomes = None if k % 2 == 0 else int(rng.integers(2, D + 1))
            povms.append(random_povm(D, rng, outcomes))
        witness = ghz_povm(system)
        drho = derivative(system)
        for theta in s.thetas:
            rho = density(WernerState(system, theta))
            j = qfi_sld(rho, drho)
            for povm in povms:
                margin = max(margin, classical_fisher(povm, rho, drho) - j)
            saturation = max(
                saturation, abs(classical_fisher(witness, rho, drho) - werner_qfi_closed_form(system, theta))
            )
    yield s.result(
        7, "measurement-bound", "J_A − J ≤ 1e-9 for random POVMs", margin, 1e-9, detail=f"{per_point} POVMs per point"
    )
    yield s.result(7, "ghz-povm-saturation", "J_A{P_Φ, I−P_Φ} = (D−1)/((1−θ)(1+(D−1)θ))", saturation, 1e-10)


def check_cramer_rao(s: _Suite) -> Iterator[CheckResult]:
    system, theta = QuditSystem(2, 2), 1.0 / 3.0
    povm = ghz_povm(system)
    target = 1.0 / werner_qfi_closed_form(system, theta)
    est = build_estimator(povm, system, theta)
    p = povm.probabilities(density(WernerState(system, theta)))
    yield s.result(
        8, "single-shot-variance", "Σ p(θ̂−θ)² = 1/J = 4/9", abs(single_shot_variance(est, p, povm.labels) - target), 1e-10
    )
    shots, trials = 10**4, 200
    first = run_experiment(system, theta, povm, shots, trials, seed=1)
    second = run_experiment(system, theta, povm, shots, trials, seed=1)
    ratio = first.estimate_variance * shots / target
    yield s.result(
        8, "monte-carlo-variance", "n·Var(θ̂) within 15% of 1/J (1e4 shots × 200 trials)", abs(ratio - 1.0), 0.15
    )
    yield s.result(8, "seed-reproducible", "identical seed ⇒ identical report", float(first != second), 0.0, "==")


def check_finite_differences(s: _Suite) -> Iterator[CheckResult]:
    h = 1e-5
    worst = 0.0
    for k in range(10 if s.fast else 20):
        rng = rng_for(99, k)
        rho, drho = random_noncommuting_pair(int(rng.integers(2, 7)), rng)
        fd = (logm(rho + h * drho) - logm(rho - h * drho)) / (2 * h)
        worst = max(worst, np.linalg.norm(exact_score_spectral(rho, drho).matrix - fd))
    yield s.result(9, "log-finite-difference", "∂ln ρ = central difference of logm, h=1e-5", worst, 1e-6)
    worst = 0.0
    step = 1e-6
    for system in DENSE_SYSTEMS:
        for theta in (0.1, 0.4, 0.9):
            plus = density(WernerState(system, theta + step)).matrix
            minus = density(WernerState(system, theta - step)).matrix
            fd = (plus - minus) / (2 * step)
            worst = max(worst, np.max(np.abs(fd - derivative(system).matrix)))
    yield s.result(9, "density-finite-difference", "∂ρ/∂θ = −I/D + |Φ⟩⟨Φ| vs central difference", worst, 1e-9)


CRITERIA: dict[int, Callable[[_Suite], Iterator[CheckResult]]] = {
    1: check_qfi_closed_form,
    2: check_minimizer,
    3: check_two_qubit_coincidence,
    4: check_universality,
    5: check_fidelity_closed_form,
    6: check_score_coincidence,
    7: check_measurement_bound,
    8: check_cramer_rao,
    9: check_finite_differences,
}


def run_criterion(number: int, fast: bool = False, tolerance: float | None = None) -> list[CheckResult]:
    return list(CRITERIA[number](_Suite(fast, tolerance)))


def run_all(fast: bool = False, tolerance: float | None = None) -> list[CheckResult]:
    suite = _Suite(fast, tolerance)
    return [result for check in CRITERIA.values() for result in check(suite)]
