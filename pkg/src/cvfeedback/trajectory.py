"""Monte-Carlo cross-check of the steady state.

Simulates the feedback-modified Ornstein-Uhlenbeck process for the
quadrature fluctuations with classical Gaussian noises whose symmetrized
correlations match the quantum ones, and estimates the stationary
covariance and the joint homodyne current.

Noise channels per step, each ``N(0, dt/2)``: input vacua ``X1, Y1, X2, Y2``
and detection-loss vacua ``V1, V2``. The measured noises are
``W_j = sqrt(eta) X_j + sqrt(1 - eta) V_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import CurrentUndefined, ParameterError, StepTooLarge, UnstableSystem
from .model import ModelParams, diffusion_matrix, drift_matrix, stability_margin

CHANNELS = ("X1", "Y1", "X2", "Y2", "V1", "V2")
SERIES_NAMES = ("x1", "y1", "x2", "y2", "current")


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    burn_in: float = 10.0
    horizon: float = 100.0
    n_traj: int = 10_000
    seed: int = 0
    record_every: int = 0  # steps between stored samples of trajectory 0; 0 disables
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.dt > 0.0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if self.burn_in < 0.0 or not self.horizon > 0.0:
            raise ParameterError("burn_in must be >= 0 and horizon > 0")
        if self.n_traj < 1:
            raise ParameterError("n_traj must be at least 1")
        if self.record_every < 0 or self.workers < 1:
            raise ParameterError("record_every must be >= 0 and workers >= 1")

    @property
    def burn_steps(self) -> int:
        return int(round(self.burn_in / self.dt))

    @property
    def avg_steps(self) -> int:
        return max(1, int(round(self.horizon / self.dt)))


@dataclass(frozen=True, eq=False)
class EnsembleStats:
    gamma_hat: np.ndarray
    stderr: np.ndarray
    mean_current: float
    mean_current_stderr: float
    n_traj: int
    epr_variance: float = float("nan")
    epr_stderr: float = float("nan")
    series: np.ndarray | None = field(default=None)

    @property
    def current_series(self) -> np.ndarray | None:
        """``(time, window-averaged current)`` samples of trajectory 0."""
        if self.series is None:
            return None
        return self.series[:, [0, 5]]


def noise_loading(p: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Loadings of the six channels onto the state noise and the current.

    Returns ``(B, c)`` with ``n = B @ xi`` the state increment and
    ``c @ xi = sqrt(eta) (dW1 - dW2)`` the current's noise increment.
    """
    se = math.sqrt(p.eta)
    sv = math.sqrt(1.0 - p.eta)
    w_diff = np.array([se, 0.0, -se, 0.0, sv, -sv])  # W1 - W2
    k = p.lam / se if p.lam != 0.0 else 0.0
    b = np.zeros((4, 6))
    b[0, 0] = b[1, 1] = b[2, 2] = b[3, 3] = 1.0
    b[0] += k * w_diff
    b[2] -= k * w_diff
    return b, se * w_diff


def increment_covariance(p: ModelParams, dt: float) -> np.ndarray:
    b, _ = noise_loading(p)
    return 0.5 * dt * (b @ b.T)


def check_noise_assembly(p: ModelParams, dt: float = 1.0, atol: float = 1e-12) -> None:
    """Raise if the channel loadings do not reproduce ``N dt``."""
    err = np.max(np.abs(increment_covariance(p, dt) - diffusion_matrix(p) * dt))
    if err > atol:
        raise AssertionError(f"noise assembly mismatch {err:.3g}")


def sample_noise_increments(p: ModelParams, dt: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` state-noise increments, shape ``(n, 4)``."""
    b, _ = noise_loading(p)
    xi = math.sqrt(0.5 * dt) * rng.standard_normal((n, 6))
    return xi @ b.T


def trajectory_generators(seed: int, n_traj: int) -> list[np.random.Generator]:
    """Independent per-trajectory streams split from one master seed."""
    children = np.random.SeedSequence(seed).spawn(n_traj)
    return [np.random.Generator(np.random.PCG64(s)) for s in children]


def _unpack(moments: np.ndarray) -> np.ndarray:
    g = np.empty(moments.shape[:-1] + (4, 4))
    for k, (i, j) in enumerate(_kernels.MOMENT_PAIRS):
        g[..., i, j] = moments[..., k]
        g[..., j, i] = moments[..., k]
    return g


def simulate_ensemble(p: ModelParams, cfg: SimConfig, backend: str | None = None) -> EnsembleStats:
    margin = stability_margin(p)
    if margin <= 0.0:
        raise UnstableSystem(f"no steady state (stability margin {margin:.3g})")
    if cfg.dt > 0.1 / margin:
        raise StepTooLarge(f"dt={cfg.dt} exceeds 0.1/margin = {0.1 / margin:.3g}")
    backend = backend or _kernels.DEFAULT_BACKEND
    if backend not in _kernels.available_backends():
        raise ParameterError(f"unknown or unavailable backend {backend!r}")
    check_noise_assembly(p, cfg.dt)

    m = drift_matrix(p)
    b, c = noise_loading(p)
    gens = trajectory_generators(cfg.seed, cfg.n_traj)
    total = cfg.burn_steps + cfg.avg_steps
    n_rec = total // cfg.record_every if cfg.record_every else 0
    series = np.zeros((n_rec, _kernels.N_SERIES_COLS))
    args = (gens, m, b, c, p.eta, cfg.dt, cfg.burn_steps, cfg.avg_steps, cfg.record_every, series)
    if backend == "numba":
        moments, current = _kernels.run_numba(*args, workers=cfg.workers)
    else:
        moments, current = _kernels.run_numpy(*args)

    n = cfg.n_traj
    # per-trajectory time averages are i.i.d.; reduce in index order
    epr = moments[:, 0] + moments[:, 7] - 2.0 * moments[:, 2]
    mean_m = moments.mean(axis=0)
    if n > 1:
        se_m = moments.std(axis=0, ddof=1) / math.sqrt(n)
        se_i = float(current.std(ddof=1) / math.sqrt(n))
        se_epr = float(epr.std(ddof=1) / math.sqrt(n))
    else:
        se_m = np.full(_kernels.N_MOMENTS, np.nan)
        se_i = se_epr = float("nan")
    return EnsembleStats(
        gamma_hat=_unpack(mean_m),
        stderr=_unpack(se_m),
        mean_current=float(current.mean()),
        mean_current_stderr=se_i,
        n_traj=n,
        epr_variance=float(epr.mean()),
        epr_stderr=se_epr,
        series=series if n_rec else None,
    )


def synthesize_current(p: ModelParams, cfg: SimConfig, backend: str | None = None):
    """Mean joint current ``eta (x1 - x2) + sqrt(eta) (W1 - W2)`` and its
    stored sample path (if ``cfg.record_every``).

    Returns ``(mean_current, stderr, series)``.
    """
    if p.eta == 0.0:
        raise CurrentUndefined("joint current undefined for eta = 0")
    stats = simulate_ensemble(p, cfg, backend)
    return stats.mean_current, stats.mean_current_stderr, stats.current_series


def z_scores(stats: EnsembleStats, reference: np.ndarray) -> np.ndarray:
    """Per-entry ``(estimate - reference) / stderr`` for the 10 independent entries."""
    iu = np.triu_indices(4)
    return (stats.gamma_hat[iu] - reference[iu]) / stats.stderr[iu]


def write_series(stats: EnsembleStats, prefix: str | Path, names=SERIES_NAMES) -> list[Path]:
    """Dump ``time value`` columns, one text file per observable."""
    if stats.series is None:
        raise ValueError("no series recorded; set SimConfig.record_every")
    prefix = Path(prefix)
    paths = []
    for name in names:
        col = 1 + SERIES_NAMES.index(name)
        path = prefix.with_name(f"{prefix.name}_{name}.txt")
        np.savetxt(path, stats.series[:, [0, col]], fmt="%.12g")
        paths.append(path)
    return paths
