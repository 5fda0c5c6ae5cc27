"""Model parameters and the linear Langevin coefficients they define.

All rates are in units of the damping rate (kappa = 1). Phase-space vectors
are ordered ``(x1, y1, x2, y2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EtaOutOfRange, FeedbackWithoutDetection, NegativeChi, UnstableMeans

DEFAULT_MIN_MARGIN = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Coupling ``chi``, detection efficiency ``eta``, feedback gain ``lam``
    and complex drive ``alpha``.

    Instances are validated on construction. ``chi >= 1/2`` is accepted here;
    the resulting instability is reported by the operations that need a
    steady state.
    """

    chi: float
    eta: float
    lam: float = 0.0
    alpha: complex = 0j

    def __post_init__(self) -> None:
        chi, eta, lam = float(self.chi), float(self.eta), float(self.lam)
        if not all(map(math.isfinite, (chi, eta, lam))):
            raise EtaOutOfRange(f"non-finite parameters: chi={chi}, eta={eta}, lam={lam}")
        if not 0.0 <= eta <= 1.0:
            raise EtaOutOfRange(f"eta must lie in [0, 1], got {eta}")
        if chi < 0.0:
            raise NegativeChi(f"chi must be non-negative, got {chi}")
        if eta == 0.0 and lam != 0.0:
            raise FeedbackWithoutDetection(
                f"feedback gain {lam} requires eta > 0 (eta = 0 means nothing is detected)"
            )
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "alpha", complex(self.alpha))

    @property
    def feedback_noise_weight(self) -> float:
        """``lam + lam**2 / eta``; zero without feedback."""
        if self.lam == 0.0:
            return 0.0
        return self.lam + self.lam**2 / self.eta


def make_params(chi: float, eta: float, lam: float = 0.0, alpha: complex = 0j) -> ModelParams:
    return ModelParams(chi, eta, lam, alpha)


def drift_matrix(p: ModelParams) -> np.ndarray:
    """Drift ``M`` of the fluctuation dynamics ``dv = -M v dt + noise``."""
    a = 0.5 - p.lam
    c = p.lam - p.chi
    return np.array(
        [
            [a, 0.0, c, 0.0],
            [0.0, 0.5, 0.0, p.chi],
            [c, 0.0, a, 0.0],
            [0.0, p.chi, 0.0, 0.5],
        ]
    )


def diffusion_matrix(p: ModelParams) -> np.ndarray:
    """Symmetrized noise correlation ``N``.

    The feedback current adds ``lam + lam**2/eta`` to the x-diagonal and
    subtracts it from the x1-x2 coupling; the y sector is pure vacuum.
    """
    q = p.feedback_noise_weight
    return np.array(
        [
            [0.5 + q, 0.0, -q, 0.0],
            [0.0, 0.5, 0.0, 0.0],
            [-q, 0.0, 0.5 + q, 0.0],
            [0.0, 0.0, 0.0, 0.5],
        ]
    )


def drift_eigenvalues(p: ModelParams) -> np.ndarray:
    """Closed-form spectrum of :func:`drift_matrix`, ascending."""
    return np.sort(
        np.array([0.5 - p.chi, 0.5 - p.chi, 0.5 + p.chi, 0.5 + p.chi - 2.0 * p.lam])
    )


def stability_margin(p: ModelParams) -> float:
    """Smallest drift eigenvalue. Positive iff a unique steady state exists."""
    return min(0.5 - p.chi, 0.5 + p.chi, 0.5 + p.chi - 2.0 * p.lam)


def steady_means(p: ModelParams) -> np.ndarray:
    """Steady quadrature means ``(<X1>, <Y1>, <X2>, <Y2>)``.

    Feedback does not shift them, so only ``chi`` and ``alpha`` enter.
    """
    if p.chi >= 0.5:
        raise UnstableMeans(f"unstable: chi >= 1/2 (chi={p.chi})")
    a = p.alpha
    # -i*sqrt2*(a - a*) = 2*sqrt2*Im(a); -sqrt2*(a + a*) = -2*sqrt2*Re(a)
    x = 2.0 * math.sqrt(2.0) * a.imag / (1.0 - 2.0 * p.chi)
    y = -2.0 * math.sqrt(2.0) * a.real / (1.0 + 2.0 * p.chi)
    return np.array([x, y, x, y])
