"""Stationary covariance of the feedback-modified Ornstein-Uhlenbeck process."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotConverged, UnstableSystem
from .model import (
    DEFAULT_MIN_MARGIN,
    ModelParams,
    diffusion_matrix,
    drift_matrix,
    stability_margin,
)

RESIDUAL_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class CovarianceState:
    """Symmetrized covariance ``Gamma`` of ``(x1, y1, x2, y2)``.

    ``gamma`` is the diagonal 2x2 block of mode 1 (the model makes both
    diagonal blocks equal) and ``sigma`` the inter-mode block.
    """

    gamma_full: np.ndarray

    def __post_init__(self) -> None:
        g = np.array(self.gamma_full, dtype=float)
        if g.shape != (4, 4):
            raise ValueError(f"covariance must be 4x4, got shape {g.shape}")
        g.setflags(write=False)
        object.__setattr__(self, "gamma_full", g)

    @property
    def gamma(self) -> np.ndarray:
        return self.gamma_full[:2, :2]

    @property
    def gamma2(self) -> np.ndarray:
        return self.gamma_full[2:, 2:]

    @property
    def sigma(self) -> np.ndarray:
        return self.gamma_full[:2, 2:]


def _margin_of(m: np.ndarray) -> float:
    return float(np.min(np.linalg.eigvals(m).real))


def solve_lyapunov(
    m: np.ndarray, n: np.ndarray, min_margin: float = DEFAULT_MIN_MARGIN
) -> CovarianceState:
    """Solve ``M G + G M^T = N`` for ``G`` by a vectorized linear solve.

    Works for any stable square ``M`` (all eigenvalues with positive real
    part); the result is symmetrized and its residual checked.
    """
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    margin = _margin_of(m)
    if margin <= min_margin:
        raise UnstableSystem(f"drift matrix not stable (margin {margin:.3g})")
    d = m.shape[0]
    eye = np.eye(d)
    # row-major vec: vec(M G) = (M kron I) vec(G), vec(G M^T) = (I kron M) vec(G)
    op = np.kron(m, eye) + np.kron(eye, m)
    g = np.linalg.solve(op, n.reshape(-1)).reshape(d, d)
    g = 0.5 * (g + g.T)
    resid = np.max(np.abs(m @ g + g @ m.T - n))
    if resid > RESIDUAL_RTOL * max(1.0, float(np.max(np.abs(n)))):
        raise NotConverged(f"Lyapunov residual {resid:.3g} above tolerance")
    return CovarianceState(g)


def closed_form_blocks(chi, eta, lam):
    """Nonzero covariance entries ``(g11, g22, s11, s22)`` in closed form.

    Accepts scalars or broadcastable arrays; ``lam`` must be 0 wherever
    ``eta`` is 0. No stability check is made here.
    """
    chi = np.asarray(chi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(lam == 0.0, 0.0, lam + lam**2 / eta)
    den = 1.0 - 4.0 * lam + 8.0 * lam * chi - 4.0 * chi**2
    g11 = (0.5 - lam + (1.0 - 2.0 * chi) * q) / den
    s11 = (chi - lam - (1.0 - 2.0 * chi) * q) / den
    g22 = 0.5 / (1.0 - 4.0 * chi**2)
    s22 = -chi / (1.0 - 4.0 * chi**2)
    return g11, np.broadcast_to(g22, g11.shape), s11, np.broadcast_to(s22, g11.shape)


def closed_form_covariance(
    p: ModelParams, min_margin: float = DEFAULT_MIN_MARGIN
) -> CovarianceState:
    margin = stability_margin(p)
    if margin <= min_margin:
        raise UnstableSystem(
            f"no steady state for chi={p.chi}, lam={p.lam} (stability margin {margin:.3g})"
        )
    g11, g22, s11, s22 = (float(v) for v in closed_form_blocks(p.chi, p.eta, p.lam))
    g = np.array(
        [
            [g11, 0.0, s11, 0.0],
            [0.0, g22, 0.0, s22],
            [s11, 0.0, g11, 0.0],
            [0.0, s22, 0.0, g22],
        ]
    )
    return CovarianceState(g)


def steady_covariance(p: ModelParams, min_margin: float = DEFAULT_MIN_MARGIN) -> CovarianceState:
    """Numerical steady state from the model's drift and diffusion."""
    if stability_margin(p) <= min_margin:
        raise UnstableSystem(f"no steady state for chi={p.chi}, lam={p.lam}")
    return solve_lyapunov(drift_matrix(p), diffusion_matrix(p), min_margin)


def epr_variance(g: CovarianceState) -> float:
    """Variance of ``x1 - x2``; values below 1 beat the vacuum level."""
    G = g.gamma_full
    return float(G[0, 0] + G[2, 2] - 2.0 * G[0, 2])
