import numpy as np
import pytest

from wernerqfi.ensembles import random_density, rng_for
from wernerqfi.errors import ParameterError, UninformativeMeasurementError, ValidationError
from wernerqfi.estimation import (
    build_estimator,
    build_estimator_from,
    run_experiment,
    sample_outcomes,
    single_shot_variance,
)
from wernerqfi.metrics import classical_fisher, computational_povm, ghz_povm, random_povm, trivial_povm
from wernerqfi.werner import QuditSystem, WernerState, derivative, density

S22 = QuditSystem(2, 2)
THIRD = 1 / 3


@pytest.fixture(scope="module")
def ghz_run():
    return run_experiment(S22, THIRD, ghz_povm(S22), 10_000, 200, seed=1)


# --- estimator -----------------------------------------------------------------------


def test_estimator_values_at_one_third():
    # p_ghz = 1/2, dp = 3/4, J = 9/4 → θ̂ = 1/3 ± 2/3
    est = build_estimator(ghz_povm(S22), S22, THIRD)
    assert est.fisher == pytest.approx(9 / 4, rel=1e-12)
    assert est.values["ghz"] == pytest.approx(1.0, abs=1e-12)
    assert est.values["rest"] == pytest.approx(-1 / 3, abs=1e-12)


def test_estimator_is_locally_unbiased():
    system = QuditSystem(3, 2)
    povm = ghz_povm(system)
    est = build_estimator(povm, system, 0.2)
    p = povm.probabilities(density(WernerState(system, 0.2)))
    assert np.dot(p, est.table(povm.labels)) == pytest.approx(0.2, abs=1e-14)


def test_uninformative_measurement_rejected():
    with pytest.raises(UninformativeMeasurementError, match="uninformative"):
        build_estimator(trivial_povm(4), S22, THIRD)


@pytest.mark.parametrize("k", range(20))
def test_single_shot_variance_identity_random_povms(k):
    rng = rng_for(41, k)
    dim = int(rng.integers(2, 9))
    h = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    drho = 0.05 * (h + h.conj().T)
    drho -= np.trace(drho).real / dim * np.eye(dim)
    rho = random_density(dim, rng)
    povm = random_povm(dim, rng, outcomes=int(rng.integers(2, dim + 1)))
    est = build_estimator_from(povm, rho, drho, 0.5)
    var = single_shot_variance(est, povm.probabilities(rho), povm.labels)
    assert var == pytest.approx(1 / est.fisher, rel=1e-10)


def test_single_shot_variance_saturating_example():
    povm = ghz_povm(S22)
    est = build_estimator(povm, S22, THIRD)
    p = povm.probabilities(density(WernerState(S22, THIRD)))
    assert abs(single_shot_variance(est, p, povm.labels) - 4 / 9) <= 1e-10


# --- sampling ------------------------------------------------------------------------


def test_single_outcome_distribution():
    np.testing.assert_array_equal(sample_outcomes([1.0], 123, seed=0), [123])


def test_sampling_zero_probability_never_drawn():
    counts = sample_outcomes([0.5, 0.0, 0.5], 10_000, seed=3)
    assert counts[1] == 0
    assert counts.sum() == 10_000


def test_binomial_counts_within_five_sigma():
    n = 1_000_000
    counts = sample_outcomes([0.5, 0.5], n, seed=7)
    assert abs(counts[0] - n / 2) <= 5 * np.sqrt(n / 4)


def test_sampling_is_deterministic():
    p = [0.1, 0.2, 0.3, 0.4]
    np.testing.assert_array_equal(sample_outcomes(p, 5000, 11), sample_outcomes(p, 5000, 11))
    assert not np.array_equal(sample_outcomes(p, 5000, 11), sample_outcomes(p, 5000, 12))


@pytest.mark.parametrize("p", [[], [0.5, 0.6], [1.2, -0.2], [np.nan, 1.0]])
def test_sampling_rejects_bad_distribution(p):
    with pytest.raises(ValidationError):
        sample_outcomes(p, 10, 0)


# --- experiments ---------------------------------------------------------------------


def test_saturating_variance_within_band(ghz_run):
    assert 0.85 * 4 / 9 <= ghz_run.estimate_variance * ghz_run.n_shots <= 1.15 * 4 / 9


def test_report_bounds(ghz_run):
    assert ghz_run.classical_bound == pytest.approx(4 / 9 / 1e4, rel=1e-12)
    assert ghz_run.quantum_bound == pytest.approx(4 / 9 / 1e4, rel=1e-12)
    assert ghz_run.single_shot_variance == pytest.approx(4 / 9, abs=1e-10)
    assert ghz_run.fisher.classical == pytest.approx(9 / 4, rel=1e-12)


def test_estimate_mean_within_five_standard_errors(ghz_run):
    se = np.sqrt(ghz_run.estimate_variance / ghz_run.n_trials)
    assert abs(ghz_run.estimate_mean - THIRD) <= 5 * se


def test_experiment_is_reproducible(ghz_run):
    again = run_experiment(S22, THIRD, ghz_povm(S22), 10_000, 200, seed=1)
    assert again.to_dict() == ghz_run.to_dict()


def test_trial_uses_seed_and_index_stream():
    povm = ghz_povm(S22)
    p = povm.probabilities(density(WernerState(S22, THIRD)))
    table = build_estimator(povm, S22, THIRD).table(povm.labels)
    manual = [sample_outcomes(p, 500, rng_for(9, k)) @ table / 500 for k in range(4)]
    r = run_experiment(S22, THIRD, povm, 500, 4, seed=9)
    assert r.estimate_mean == pytest.approx(np.mean(manual), rel=1e-14)
    assert r.estimate_variance == pytest.approx(np.var(manual, ddof=1), rel=1e-12)


def test_doubling_shots_halves_variance():
    povm = ghz_povm(S22)
    a = run_experiment(S22, THIRD, povm, 10_000, 200, seed=1)
    b = run_experiment(S22, THIRD, povm, 20_000, 200, seed=1)
    assert 0.8 * 2 <= a.estimate_variance / b.estimate_variance <= 1.2 * 2


@pytest.mark.parametrize("povm_name", ["ghz", "computational"])
def test_ordering_chain(povm_name):
    povm = ghz_povm(S22) if povm_name == "ghz" else computational_povm(4)
    r = run_experiment(S22, THIRD, povm, 10_000, 200, seed=1)
    assert r.quantum_bound <= r.classical_bound * (1 + 1e-12)
    assert r.classical_bound <= r.estimate_variance * (1 + 5 / np.sqrt(r.n_trials))


def test_computational_basis_gap():
    povm = computational_povm(4)
    r = run_experiment(S22, THIRD, povm, 10_000, 200, seed=1)
    rho = density(WernerState(S22, THIRD))
    j_a = classical_fisher(povm, rho, derivative(S22))
    assert r.classical_bound == pytest.approx(1 / (1e4 * j_a), rel=1e-12)
    assert r.classical_bound > r.quantum_bound * 1.5
    assert r.estimate_variance * (1 + 5 / np.sqrt(200)) >= r.classical_bound


def test_single_trial_has_zero_variance():
    r = run_experiment(S22, THIRD, ghz_povm(S22), 100, 1, seed=0)
    assert r.estimate_variance == 0.0


@pytest.mark.parametrize("shots, trials", [(0, 10), (10, 0)])
def test_experiment_rejects_empty_runs(shots, trials):
    with pytest.raises(ValidationError):
        run_experiment(S22, THIRD, ghz_povm(S22), shots, trials, seed=0)


def test_experiment_rejects_theta_one():
    with pytest.raises(ParameterError):
        run_experiment(S22, 1.0, ghz_povm(S22), 10, 10, seed=0)
