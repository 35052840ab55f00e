import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wernerqfi.errors import CapacityError, DimensionError, DomainError, ValidationError
from wernerqfi.hermitian import (
    HermitianOperator,
    check_dense,
    dense_cap,
    eigh,
    kron,
    kron_all,
    spectral_function,
    trace_product,
)
from wernerqfi.werner import QuditSystem, WernerState, density, ghz_projector

from conftest import random_hermitian, random_pd

X = np.array([[0, 1], [1, 0]])


def test_kron_identity():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_diagonal():
    np.testing.assert_array_equal(kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))


def test_kron_pauli_x_is_antidiagonal():
    expected = np.zeros((4, 4))
    for i in range(4):
        expected[i, 3 - i] = 1.0
    np.testing.assert_array_equal(kron(X, X), expected)


def test_kron_left_factor_is_most_significant():
    a = np.arange(4).reshape(2, 2)
    b = np.arange(9).reshape(3, 3) + 10
    out = kron(a, b)
    for i in range(2):
        for j in range(2):
            for k in range(3):
                for m in range(3):
                    assert out[i * 3 + k, j * 3 + m] == a[i, j] * b[k, m]


def test_kron_rejects_non_square():
    with pytest.raises(DimensionError):
        kron(np.ones((2, 3)), np.eye(2))


@pytest.mark.parametrize(
    "matrix, expected",
    [(np.eye(3), [1, 1, 1]), (np.diag([2.0, -1.0]), [-1, 2]), (X, [-1, 1])],
)
def test_eigh_small_cases(matrix, expected):
    np.testing.assert_allclose(eigh(matrix).eigenvalues, expected, atol=1e-14)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_operator_is_symmetrized_and_read_only():
    m = np.array([[1.0, 0.5 + 1e-14], [0.5, 2.0]])
    op = HermitianOperator(m)
    np.testing.assert_array_equal(op.matrix, op.matrix.conj().T)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 3.0


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 64))
def test_eigh_reconstruction_and_unitarity(seed, dim):
    h = random_hermitian(np.random.default_rng(seed), dim)
    dec = eigh(h)
    scale = max(1.0, np.linalg.norm(h))
    assert np.all(np.diff(dec.eigenvalues) >= 0)
    assert np.linalg.norm(dec.reconstruct() - h) <= 1e-10 * scale
    v = dec.eigenvectors
    assert np.linalg.norm(v.conj().T @ v - np.eye(dim)) <= 1e-10


def test_spectral_function_sqrt():
    np.testing.assert_allclose(spectral_function(np.diag([4.0, 9.0]), np.sqrt).matrix, np.diag([2.0, 3.0]))


def test_spectral_function_log_of_scalar_matrix():
    D = 8
    out = spectral_function(np.eye(D) / 2, np.log).matrix
    np.testing.assert_allclose(out, -np.log(2) * np.eye(D), atol=1e-15)


def test_spectral_function_log_of_werner_state():
    rho = density(WernerState(QuditSystem(2, 2), 0.5))
    w = eigh(spectral_function(rho, np.log)).eigenvalues
    np.testing.assert_allclose(w, [np.log(1 / 8)] * 3 + [np.log(5 / 8)], atol=1e-13)


def test_spectral_function_identity_round_trip(rng):
    h = random_hermitian(rng, 7)
    np.testing.assert_allclose(spectral_function(h, lambda w: w).matrix, h, atol=1e-12)


def test_spectral_function_domain_error_names_eigenvalue():
    with pytest.raises(DomainError, match="-1.0"):
        spectral_function(np.diag([-1.0, 2.0]), np.log)
    with pytest.raises(DomainError):
        spectral_function(np.diag([0.5, 2.0]), np.log, domain=lambda x: x > 1.0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 32))
def test_exp_log_round_trip(seed, dim):
    rho = random_pd(np.random.default_rng(seed), dim)
    back = spectral_function(spectral_function(rho, np.log), np.exp).matrix
    assert np.linalg.norm(back - rho) <= 1e-9 * np.linalg.norm(rho)


def test_trace_product_examples():
    rho = density(WernerState(QuditSystem(3, 2), 0.7))
    assert trace_product(np.eye(9), rho) == pytest.approx(1.0, abs=1e-14)
    assert trace_product(np.diag([1, 2]), np.diag([3, 4])) == 11
    two = QuditSystem(2, 2)
    value = trace_product(ghz_projector(two), density(WernerState(two, 1 / 3)))
    # closed form (1 − θ + Dθ)/D at θ = 1/3, D = 4
    assert value.real == pytest.approx((1 - 1 / 3 + 4 / 3) / 4, abs=1e-14)
    assert abs(value.imag) <= 1e-12


def test_trace_product_dimension_mismatch():
    with pytest.raises(DimensionError):
        trace_product(np.eye(2), np.eye(3))


def test_trace_product_imaginary_part_vanishes_for_hermitian(rng):
    a, b = random_hermitian(rng, 6), random_hermitian(rng, 6)
    assert abs(trace_product(a, b).imag) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_kron_associative_and_trace_multiplicative(seed):
    rng = np.random.default_rng(seed)
    # Gaussian-integer entries keep every product exact, so equality is bitwise
    a, b, c = (rng.integers(-9, 10, (k, k)) + 1j * rng.integers(-9, 10, (k, k)) for k in (2, 3, 2))
    np.testing.assert_array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))
    a, b = random_hermitian(rng, 4), random_hermitian(rng, 3)
    lhs = np.trace(kron(a, b))
    rhs = np.trace(a) * np.trace(b)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_kron_all_matches_nested():
    factors = [np.eye(2), X, np.diag([1.0, 2.0, 3.0])]
    np.testing.assert_array_equal(kron_all(factors), kron(kron(factors[0], factors[1]), factors[2]))


def test_dense_cap_env_override(monkeypatch):
    monkeypatch.setenv("WERNERQFI_DENSE_CAP", "16")
    assert dense_cap() == 16
    with pytest.raises(CapacityError):
        check_dense(32)
    assert dense_cap(64) == 64
    monkeypatch.delenv("WERNERQFI_DENSE_CAP")
    assert dense_cap() == 1024
