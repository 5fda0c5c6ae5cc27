"""Symplectic spectra, physicality and logarithmic negativity of two-mode
Gaussian covariances (vacuum variance 1/2)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchViolation, NotPositiveDefinite, StructureViolation
from .steady_state import CovarianceState, epr_variance

_OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA = np.kron(np.eye(2), _OMEGA_1)
PT_FLIP = np.diag([1.0, 1.0, 1.0, -1.0])

PAIRING_TOL = 1e-9
BLOCK_TOL = 1e-10
RADICAND_TOL = 1e-12


def symplectic_form() -> np.ndarray:
    return OMEGA.copy()


@dataclass(frozen=True)
class EntanglementReport:
    zeta: float
    log_negativity: float
    nu_min: float
    epr_variance: float


def symplectic_eigenvalues(g: CovarianceState) -> tuple[float, float]:
    """Return ``(nu1, nu2)``, ``nu1 <= nu2``, from the moduli of eig(Omega G)."""
    G = g.gamma_full
    if not np.allclose(G, G.T, rtol=0.0, atol=1e-12 * max(1.0, np.max(np.abs(G)))):
        raise StructureViolation("covariance matrix is not symmetric")
    if np.min(np.linalg.eigvalsh(G)) <= 0.0:
        raise NotPositiveDefinite("covariance matrix is not positive definite")
    mods = np.sort(np.abs(np.linalg.eigvals(OMEGA @ G)))
    scale = max(1.0, float(mods[-1]))
    if abs(mods[0] - mods[1]) > PAIRING_TOL * scale or abs(mods[2] - mods[3]) > PAIRING_TOL * scale:
        raise StructureViolation(f"eigenvalues of Omega*Gamma do not pair: {mods}")
    return 0.5 * float(mods[0] + mods[1]), 0.5 * float(mods[2] + mods[3])


def is_physical(g: CovarianceState, tol: float = 1e-9) -> bool:
    """Uncertainty principle ``Gamma + (i/2) Omega >= 0`` via ``nu_min >= 1/2``."""
    try:
        nu1, _ = symplectic_eigenvalues(g)
    except NotPositiveDefinite:
        return False
    return nu1 >= 0.5 - tol


def partial_transpose(g: CovarianceState) -> CovarianceState:
    """Flip the sign of mode 2's momentum."""
    return CovarianceState(PT_FLIP @ g.gamma_full @ PT_FLIP)


def zeta_from_determinants(det_gamma, det_sigma, det_full):
    """Smallest PT symplectic eigenvalue for equal diagonal blocks.

    Vectorized. ``delta - sqrt(delta**2 - det)`` is evaluated as
    ``det / (delta + sqrt(delta**2 - det))`` to avoid cancellation when
    ``delta**2 >> det``. Radicands above ``-RADICAND_TOL`` are clamped to
    zero; anything more negative yields NaN.
    """
    delta = np.asarray(det_gamma - det_sigma, dtype=float)
    det_full = np.asarray(det_full, dtype=float)
    inner = delta**2 - det_full
    inner = np.where((inner < 0.0) & (inner >= -RADICAND_TOL), 0.0, inner)
    with np.errstate(invalid="ignore", divide="ignore"):
        root = np.sqrt(inner)
        denom = delta + root
        outer = np.where(denom > 0.0, det_full / denom, delta - root)
        outer = np.where((outer < 0.0) & (outer >= -RADICAND_TOL), 0.0, outer)
        return np.sqrt(outer)


def pt_zeta(g: CovarianceState) -> float:
    if np.max(np.abs(g.gamma - g.gamma2)) > BLOCK_TOL:
        raise StructureViolation("diagonal blocks differ; closed-form zeta does not apply")
    det_g = float(np.linalg.det(g.gamma))
    det_s = float(np.linalg.det(g.sigma))
    det_G = float(np.linalg.det(g.gamma_full))
    delta = det_g - det_s
    if delta**2 - det_G < -RADICAND_TOL or delta - math.sqrt(max(delta**2 - det_G, 0.0)) < -RADICAND_TOL:
        raise BranchViolation("negative radicand in the PT symplectic eigenvalue")
    return float(zeta_from_determinants(det_g, det_s, det_G))


def log_negativity_from_zeta(zeta):
    """``max(0, -log2(2 zeta))``, vectorized."""
    zeta = np.asarray(zeta, dtype=float)
    with np.errstate(divide="ignore"):
        return np.maximum(0.0, -np.log2(2.0 * zeta)) + 0.0  # no negative zero


def log_negativity(g: CovarianceState) -> float:
    return float(log_negativity_from_zeta(pt_zeta(g)))


def entanglement_report(g: CovarianceState) -> EntanglementReport:
    zeta = pt_zeta(g)
    return EntanglementReport(
        zeta=zeta,
        log_negativity=float(log_negativity_from_zeta(zeta)),
        nu_min=symplectic_eigenvalues(g)[0],
        epr_variance=epr_variance(g),
    )
