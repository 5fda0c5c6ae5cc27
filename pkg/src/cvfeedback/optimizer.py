"""Maximization of the steady-state log negativity over the feedback gain."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entanglement import is_physical, log_negativity, log_negativity_from_zeta, zeta_from_determinants
from .errors import ParameterError, UnstableSystem
from .model import DEFAULT_MIN_MARGIN, ModelParams
from .steady_state import closed_form_blocks, closed_form_covariance

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerConfig:
    grid_points: int = 2001
    tol: float = 1e-7
    margin: float = DEFAULT_MIN_MARGIN
    lambda_floor: float = -4.0
    physical_tol: float = 1e-9
    bisect_tol: float = 1e-9
    scan_step: float = 1.0 / 128.0
    min_gain: float = 1e-9  # relative to max|Gamma|: smaller gains are rounding noise

    def __post_init__(self) -> None:
        if self.grid_points < 3:
            raise ParameterError("grid_points must be at least 3")
        if not self.tol > 0.0:
            raise ParameterError("tol must be positive")
        if not self.margin >= 0.0:
            raise ParameterError("margin must be non-negative")


@dataclass(frozen=True)
class OptimizationResult:
    chi: float
    eta: float
    lambda_star: float
    l_fb: float
    l_nofb: float
    valid_interval: tuple[float, float]
    evaluations: int


def _physical_at(chi: float, eta: float, lam: float, cfg: OptimizerConfig) -> bool:
    p = ModelParams(chi, eta, lam)
    return is_physical(closed_form_covariance(p, min_margin=0.0), cfg.physical_tol)


def _physical_edge(chi: float, eta: float, cap: float, cfg: OptimizerConfig) -> float:
    """Walk from 0 towards ``cap`` until the state turns unphysical, then bisect."""
    direction = math.copysign(1.0, cap)
    inside = 0.0
    while inside != cap:
        probe = inside + direction * cfg.scan_step
        if direction * (probe - cap) > 0.0:
            probe = cap
        if not _physical_at(chi, eta, probe, cfg):
            outside = probe
            while abs(outside - inside) > cfg.bisect_tol:
                mid = 0.5 * (inside + outside)
                if _physical_at(chi, eta, mid, cfg):
                    inside = mid
                else:
                    outside = mid
            return inside
        inside = probe
    return cap


def valid_lambda_interval(
    chi: float, eta: float, margin: float = DEFAULT_MIN_MARGIN, cfg: OptimizerConfig | None = None
) -> tuple[float, float]:
    """Connected window of feedback gains around 0 giving a stable, physical state."""
    cfg = cfg or OptimizerConfig(margin=margin)
    if not 0.0 <= chi:
        raise ParameterError(f"chi must be non-negative, got {chi}")
    if not 0.0 < eta <= 1.0:
        raise ParameterError(f"eta must lie in (0, 1], got {eta}")
    if 0.5 - chi <= margin:
        raise UnstableSystem(f"unstable: chi >= 1/2 (chi={chi})")
    upper_cap = (0.5 + chi) / 2.0 - margin
    lo = _physical_edge(chi, eta, cfg.lambda_floor, cfg)
    hi = _physical_edge(chi, eta, upper_cap, cfg)
    return lo, hi


def log_negativity_profile(chi: float, eta: float, lams: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``L(lam)`` and minimal symplectic eigenvalue on a gain grid."""
    g11, g22, s11, s22 = closed_form_blocks(chi, eta, lams)
    zeta = zeta_from_determinants(g11 * g22, s11 * s22, (g11**2 - s11**2) * (g22**2 - s22**2))
    with np.errstate(invalid="ignore"):
        nu_min = np.sqrt(np.minimum((g11 - s11) * (g22 - s22), (g11 + s11) * (g22 + s22)))
    return log_negativity_from_zeta(zeta), nu_min


def _golden_max(f, a: float, b: float, tol: float) -> tuple[float, float, int]:
    """Bounded golden-section search for a maximum of ``f`` on ``[a, b]``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    n = 2
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        n += 1
    return (c, fc, n) if fc >= fd else (d, fd, n)


def maximize_log_negativity(chi: float, eta: float, cfg: OptimizerConfig | None = None) -> OptimizationResult:
    cfg = cfg or OptimizerConfig()
    chi, eta = float(chi), float(eta)

    def objective(lam: float) -> float:
        return log_negativity(closed_form_covariance(ModelParams(chi, eta, lam), min_margin=cfg.margin))

    l_nofb = objective(0.0) if eta > 0.0 else log_negativity(
        closed_form_covariance(ModelParams(chi, 0.0, 0.0), min_margin=cfg.margin)
    )
    if eta == 0.0:
        return OptimizationResult(chi, eta, 0.0, l_nofb, l_nofb, (0.0, 0.0), 1)

    lo, hi = valid_lambda_interval(chi, eta, cfg.margin, cfg)
    grid = np.linspace(lo, hi, cfg.grid_points)
    values, nu_min = log_negativity_profile(chi, eta, grid)
    values = np.where(nu_min >= 0.5 - cfg.physical_tol, values, -np.inf)
    i = int(np.argmax(values))
    evaluations = 1 + grid.size

    best_lam, best_val = float(grid[i]), objective(float(grid[i]))
    a, b = float(grid[max(i - 1, 0)]), float(grid[min(i + 1, grid.size - 1)])
    lam_g, val_g, n = _golden_max(objective, a, b, cfg.tol)
    evaluations += n + 1
    if val_g > best_val:
        best_lam, best_val = lam_g, val_g
    g_best = closed_form_covariance(ModelParams(chi, eta, best_lam), min_margin=cfg.margin).gamma_full
    if best_val <= l_nofb + cfg.min_gain * max(1.0, float(np.max(np.abs(g_best)))):
        best_lam, best_val = 0.0, l_nofb
    return OptimizationResult(chi, eta, best_lam, best_val, l_nofb, (lo, hi), evaluations)
