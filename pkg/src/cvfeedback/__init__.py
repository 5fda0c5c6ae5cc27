"""Steady-state entanglement of two parametrically coupled, damped bosonic
modes under Markovian homodyne feedback (Gaussian covariance picture)."""

from .entanglement import (
    EntanglementReport,
    entanglement_report,
    is_physical,
    log_negativity,
    partial_transpose,
    pt_zeta,
    symplectic_eigenvalues,
    symplectic_form,
)
from .errors import *  # noqa: F401,F403
from .model import (
    ModelParams,
    diffusion_matrix,
    drift_eigenvalues,
    drift_matrix,
    make_params,
    stability_margin,
    steady_means,
)
from .optimizer import (
    OptimizationResult,
    OptimizerConfig,
    maximize_log_negativity,
    valid_lambda_interval,
)
from .steady_state import (
    CovarianceState,
    closed_form_covariance,
    epr_variance,
    solve_lyapunov,
    steady_covariance,
)
from .trajectory import EnsembleStats, SimConfig, simulate_ensemble, synthesize_current

__version__ = "0.1.0"
