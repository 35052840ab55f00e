"""Logarithmic derivatives (quantum scores) of a positive-definite ρ(θ).

Three scores are provided:

* ``sld`` solves ``∂ρ = (ρL + Lρ)/2``;
* ``rld`` solves ``∂ρ = ρL``;
* the exact score ``∂(ln ρ)/∂θ``, obtained either from the Daleckii-Krein
  divided difference of ``ln`` in ρ's eigenbasis or by numerically evaluating

      ∂θ ln ρ = ∫₀^∞ dx ∫₀¹ dλ  e^{−λxρ} ∂ρ e^{−(1−λ)xρ}

  which follows from ``ln ρ = ∫₀^∞ (e^{−x} − e^{−xρ}) dx/x`` and the
  derivative of an operator exponential.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DimensionError, ValidationError
from .hermitian import HermitianOperator, as_hermitian, as_square, require_positive_definite

DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings for :func:`exact_score_quadrature`.

    The outer integral is truncated at ``x_truncation_factor / λ_min`` and
    split into ``panels`` composite Gauss-Legendre panels of ``outer_order``
    nodes on a geometrically graded mesh; the panel count doubles until two
    successive estimates agree to ``rel_tol``.
    """

    rel_tol: float = 1e-8
    x_truncation_factor: float = 50.0
    panels: int = 16
    inner_order: int = 32
    outer_order: int = 16
    max_panels: int = 4096

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValidationError("rel_tol must be positive")
        if self.inner_order < 2 or self.outer_order < 2:
            raise ValidationError("Gauss-Legendre orders must be at least 2")
        if self.panels < 1 or self.max_panels < self.panels:
            raise ValidationError("need 1 <= panels <= max_panels")
        if not self.x_truncation_factor > 0:
            raise ValidationError("x_truncation_factor must be positive")


@dataclass(frozen=True)
class QuadratureResult:
    score: HermitianOperator
    residual: float
    panels: int
    tail_bound: float


@dataclass(frozen=True)
class ScoreTriple:
    sld: HermitianOperator
    rld: np.ndarray
    exact: HermitianOperator


def _pair(rho, drho) -> tuple[HermitianOperator, HermitianOperator]:
    r = require_positive_definite(rho)
    dr = as_hermitian(drho)
    if r.dim != dr.dim:
        raise DimensionError(f"rho is {r.dim}x{r.dim} but drho is {dr.dim}x{dr.dim}")
    return r, dr


def _in_eigenbasis(rho: HermitianOperator, drho: HermitianOperator):
    w, v = rho.eig.eigenvalues, rho.eig.eigenvectors
    return w, v, v.conj().T @ drho.matrix @ v


def _from_eigenbasis(v: np.ndarray, m: np.ndarray) -> HermitianOperator:
    return HermitianOperator(v @ m @ v.conj().T, tol=1e-10)


def sld(rho, drho) -> HermitianOperator:
    """Symmetric logarithmic derivative, ``L_ij = 2 (∂ρ)_ij / (λ_i + λ_j)``."""
    r, dr = _pair(rho, drho)
    w, v, d = _in_eigenbasis(r, dr)
    return _from_eigenbasis(v, 2.0 * d / (w[:, None] + w[None, :]))


def rld(rho, drho) -> np.ndarray:
    """Right logarithmic derivative ``ρ⁻¹ ∂ρ`` (not Hermitian in general)."""
    r, dr = _pair(rho, drho)
    return np.linalg.solve(r.matrix, dr.matrix)


def log_divided_difference(w: np.ndarray) -> np.ndarray:
    """Matrix of ``(ln λ_i − ln λ_j)/(λ_i − λ_j)`` with limit ``1/λ`` on ties."""
    a = w[:, None]
    b = w[None, :]
    diff = a - b
    tied = np.abs(diff) < DEGENERACY_RTOL * np.maximum(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.log1p(diff / b) / diff
    return np.where(tied, 2.0 / (a + b), ratio)


def exact_score_spectral(rho, drho) -> HermitianOperator:
    """``∂(ln ρ)/∂θ`` via the divided difference of the logarithm."""
    r, dr = _pair(rho, drho)
    w, v, d = _in_eigenbasis(r, dr)
    return _from_eigenbasis(v, d * log_divided_difference(w))


def score_triple(rho, drho) -> ScoreTriple:
    return ScoreTriple(sld(rho, drho), rld(rho, drho), exact_score_spectral(rho, drho))


# --- numerical double quadrature -------------------------------------------


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _composite(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss_legendre(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    return (half * x + 0.5 * (hi + lo)).ravel(), (half * w).ravel()


@lru_cache(maxsize=4096)
def _inner_edges(levels: int) -> np.ndarray:
    # geometric panels clustered at both ends of [0, 1]; smallest width 2^-(levels+1)
    if levels == 0:
        return np.array([0.0, 1.0])
    left = np.concatenate([[0.0], 0.5 ** np.arange(levels, 0, -1)])
    return np.concatenate([left, 1.0 - left[::-1][1:]])


def _inner_rule(spread: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on [0, 1] resolving ``e^{−c λ}`` for exponent spreads up to ``spread``."""
    # one panel of the fixed order is exact to round-off while c stays below ~16
    levels = 0 if spread <= 16.0 else int(np.ceil(np.log2(spread / 8.0)))
    return _composite(_inner_edges(levels), order)


def _cluster(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Group numerically degenerate eigenvalues; returns (representatives, labels)."""
    labels = np.empty(w.size, dtype=np.int64)
    groups: list[list[float]] = []
    anchor = None
    for k, lam in enumerate(w):
        if anchor is None or lam - anchor > DEGENERACY_RTOL * lam:
            groups.append([])
            anchor = lam
        groups[-1].append(lam)
        labels[k] = len(groups) - 1
    return np.array([np.mean(g) for g in groups]), labels


def _outer_edges(x_max: float, scale: float, panels: int) -> np.ndarray:
    # edges x_max·expm1(αk/P)/expm1(α): nested under doubling, first panel ~ α/(P·λ_max)
    alpha = np.log1p(scale)
    return x_max * np.expm1(alpha * np.arange(panels + 1) / panels) / np.expm1(alpha)


def _score_kernel(values: np.ndarray, x_max: float, panels: int, cfg: QuadratureConfig) -> np.ndarray:
    """K[p, q] = ∫₀^{x_max} dx ∫₀¹ dλ exp(−x(λ a_p + (1−λ) a_q))."""
    spread = float(values[-1] - values[0])
    xs, wx = _composite(_outer_edges(x_max, x_max * values[-1], panels), cfg.outer_order)
    kernel = np.zeros((values.size, values.size))
    for x, weight in zip(xs, wx):
        t, wt = _inner_rule(x * spread, cfg.inner_order)
        left = np.exp(-x * np.outer(t, values))
        right = np.exp(-x * np.outer(1.0 - t, values))
        kernel += weight * ((left.T * wt) @ right)
    return kernel


def integrate_score(rho, drho, cfg: QuadratureConfig | None = None) -> QuadratureResult:
    """Adaptive evaluation of the double integral for ``∂(ln ρ)/∂θ``.

    Raises :class:`ConvergenceError` if ``cfg.max_panels`` is exhausted.
    """
    cfg = cfg or QuadratureConfig()
    r, dr = _pair(rho, drho)
    w, v, d = _in_eigenbasis(r, dr)
    values, labels = _cluster(w)
    lam_min = values[0]
    x_max = cfg.x_truncation_factor / lam_min
    # tail ∫_{x_max}^∞ e^{−x λ_min} dx relative to the 1/λ_min scale of the score
    tail = float(np.exp(-cfg.x_truncation_factor))

    def assemble(panels):
        k = _score_kernel(values, x_max, panels, cfg)
        return d * k[np.ix_(labels, labels)]

    panels = cfg.panels
    residual = float("inf")
    previous = assemble(panels)
    while True:
        if 2 * panels > cfg.max_panels:
            raise ConvergenceError("score quadrature did not converge", residual, panels)
        panels *= 2
        current = assemble(panels)
        scale = np.linalg.norm(current)
        residual = float(np.linalg.norm(current - previous) / scale) if scale > 0 else 0.0
        if residual < cfg.rel_tol:
            return QuadratureResult(_from_eigenbasis(v, current), residual, panels, tail)
        previous = current


def exact_score_quadrature(rho, drho, cfg: QuadratureConfig | None = None) -> HermitianOperator:
    return integrate_score(rho, drho, cfg).score


def log_quadrature(rho, cfg: QuadratureConfig | None = None) -> HermitianOperator:
    """``ln ρ`` from ``∫₀^∞ (e^{−x} − e^{−xρ}) dx/x``, counterterm included."""
    cfg = cfg or QuadratureConfig()
    r = require_positive_definite(rho)
    w, v = r.eig.eigenvalues, r.eig.eigenvectors
    lo, hi = min(w[0], 1.0), max(w[-1], 1.0)
    x_max = cfg.x_truncation_factor / lo

    def evaluate(panels):
        xs, wx = _composite(_outer_edges(x_max, x_max * hi, panels), cfg.outer_order)
        integrand = (np.exp(-xs)[:, None] - np.exp(-np.outer(xs, w))) / xs[:, None]
        return wx @ integrand

    panels = cfg.panels
    residual = float("inf")
    previous = evaluate(panels)
    while True:
        if 2 * panels > cfg.max_panels:
            raise ConvergenceError("log quadrature did not converge", residual, panels)
        panels *= 2
        current = evaluate(panels)
        scale = max(np.linalg.norm(current), 1.0)
        residual = float(np.linalg.norm(current - previous) / scale)
        if residual < cfg.rel_tol:
            return HermitianOperator((v * current) @ v.conj().T)
        previous = current


def defining_residuals(rho, drho, triple: ScoreTriple | None = None) -> dict[str, float]:
    """Frobenius residuals of each score's defining relation, relative to ‖∂ρ‖_F."""
    r, dr = _pair(rho, drho)
    triple = triple or score_triple(r, dr)
    m, dm = r.matrix, dr.matrix
    scale = max(np.linalg.norm(dm), np.finfo(float).tiny)
    ls, lr = triple.sld.matrix, as_square(triple.rld)
    return {
        "sld": float(np.linalg.norm(0.5 * (m @ ls + ls @ m) - dm) / scale),
        "rld": float(np.linalg.norm(m @ lr - dm) / scale),
    }
