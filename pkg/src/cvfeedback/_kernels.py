"""Euler-Maruyama integrators for ``dv = -M v dt + B xi``.

Two interchangeable backends consume identical per-trajectory random
streams (one ``numpy.random.Generator`` per trajectory, six standard normals
per step in channel order):

* ``numba``: one trajectory per call, ``@njit(nogil=True)`` scalar loop.
* ``numpy``: a chunk of trajectories advanced in lockstep with array ops.

Set ``CVFEEDBACK_DISABLE_NUMBA=1`` to force the numpy path (it is also used
when numba is not importable).
"""

from __future__ import annotations

import os

import numpy as np

N_CHANNELS = 6
N_MOMENTS = 10
N_SERIES_COLS = 6  # time, x1, y1, x2, y2, window-averaged current
MOMENT_PAIRS = tuple((i, j) for i in range(4) for j in range(i, 4))

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

_DISABLED = os.environ.get("CVFEEDBACK_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")
DEFAULT_BACKEND = "numba" if HAVE_NUMBA and not _DISABLED else "numpy"


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def _trajectory_py(gen, m, b, c, eta, dt, n_burn, n_avg, rec_every, moments, current, series):
    s = np.sqrt(0.5 * dt)
    v0 = 0.0
    v1 = 0.0
    v2 = 0.0
    v3 = 0.0
    xi = np.empty(N_CHANNELS)
    for k in range(N_MOMENTS):
        moments[k] = 0.0
    current[0] = 0.0
    window = 0.0
    n_rec = 0
    for step in range(n_burn + n_avg):
        for j in range(N_CHANNELS):
            xi[j] = s * gen.standard_normal()
        d_i = eta * (v0 - v2) * dt + (
            c[0] * xi[0] + c[1] * xi[1] + c[2] * xi[2] + c[3] * xi[3] + c[4] * xi[4] + c[5] * xi[5]
        )
        n0 = b[0, 0] * xi[0] + b[0, 1] * xi[1] + b[0, 2] * xi[2] + b[0, 3] * xi[3] + b[0, 4] * xi[4] + b[0, 5] * xi[5]
        n1 = b[1, 0] * xi[0] + b[1, 1] * xi[1] + b[1, 2] * xi[2] + b[1, 3] * xi[3] + b[1, 4] * xi[4] + b[1, 5] * xi[5]
        n2 = b[2, 0] * xi[0] + b[2, 1] * xi[1] + b[2, 2] * xi[2] + b[2, 3] * xi[3] + b[2, 4] * xi[4] + b[2, 5] * xi[5]
        n3 = b[3, 0] * xi[0] + b[3, 1] * xi[1] + b[3, 2] * xi[2] + b[3, 3] * xi[3] + b[3, 4] * xi[4] + b[3, 5] * xi[5]
        f0 = m[0, 0] * v0 + m[0, 1] * v1 + m[0, 2] * v2 + m[0, 3] * v3
        f1 = m[1, 0] * v0 + m[1, 1] * v1 + m[1, 2] * v2 + m[1, 3] * v3
        f2 = m[2, 0] * v0 + m[2, 1] * v1 + m[2, 2] * v2 + m[2, 3] * v3
        f3 = m[3, 0] * v0 + m[3, 1] * v1 + m[3, 2] * v2 + m[3, 3] * v3
        v0 = v0 - f0 * dt + n0
        v1 = v1 - f1 * dt + n1
        v2 = v2 - f2 * dt + n2
        v3 = v3 - f3 * dt + n3
        if step >= n_burn:
            moments[0] += v0 * v0
            moments[1] += v0 * v1
            moments[2] += v0 * v2
            moments[3] += v0 * v3
            moments[4] += v1 * v1
            moments[5] += v1 * v2
            moments[6] += v1 * v3
            moments[7] += v2 * v2
            moments[8] += v2 * v3
            moments[9] += v3 * v3
            current[0] += d_i
        if rec_every > 0:
            window += d_i
            if (step + 1) % rec_every == 0 and n_rec < series.shape[0]:
                series[n_rec, 0] = (step + 1) * dt
                series[n_rec, 1] = v0
                series[n_rec, 2] = v1
                series[n_rec, 3] = v2
                series[n_rec, 4] = v3
                series[n_rec, 5] = window / (rec_every * dt)
                window = 0.0
                n_rec += 1
    for k in range(N_MOMENTS):
        moments[k] = moments[k] / n_avg
    current[0] = current[0] / (n_avg * dt)


if HAVE_NUMBA:
    _trajectory_jit = njit(cache=True, nogil=True)(_trajectory_py)
else:  # pragma: no cover
    _trajectory_jit = None


def run_numba(gens, m, b, c, eta, dt, n_burn, n_avg, rec_every, series, workers=1):
    """Integrate each generator's trajectory; returns per-trajectory
    ``(moments[n, 10], current[n])``. Trajectory 0 fills ``series``."""
    n = len(gens)
    moments = np.empty((n, N_MOMENTS))
    current = np.empty((n, 1))
    empty = np.empty((0, N_SERIES_COLS))

    def one(i):
        _trajectory_jit(
            gens[i], m, b, c, eta, dt, n_burn, n_avg, rec_every if i == 0 else 0,
            moments[i], current[i], series if i == 0 else empty,
        )

    if workers <= 1:
        for i in range(n):
            one(i)
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(n)))
    return moments, current[:, 0]


def run_numpy(gens, m, b, c, eta, dt, n_burn, n_avg, rec_every, series, chunk=2048, block=1024):
    """Vectorized counterpart of :func:`run_numba` (same streams, same results)."""
    n = len(gens)
    moments = np.zeros((n, N_MOMENTS))
    current = np.zeros(n)
    s = np.sqrt(0.5 * dt)
    total = n_burn + n_avg
    for start in range(0, n, chunk):
        sub = gens[start:start + chunk]
        nc = len(sub)
        v0 = np.zeros(nc)
        v1 = np.zeros(nc)
        v2 = np.zeros(nc)
        v3 = np.zeros(nc)
        acc = moments[start:start + nc]
        cur = current[start:start + nc]
        record = rec_every > 0 and start == 0
        window = 0.0
        n_rec = 0
        for b0 in range(0, total, block):
            nb = min(block, total - b0)
            xi_all = s * np.stack([g.standard_normal((nb, N_CHANNELS)) for g in sub], axis=1)
            for t in range(nb):
                step = b0 + t
                xi = xi_all[t]
                x0, x1, x2, x3, x4, x5 = xi[:, 0], xi[:, 1], xi[:, 2], xi[:, 3], xi[:, 4], xi[:, 5]
                d_i = eta * (v0 - v2) * dt + (c[0] * x0 + c[1] * x1 + c[2] * x2 + c[3] * x3 + c[4] * x4 + c[5] * x5)
                n0 = b[0, 0] * x0 + b[0, 1] * x1 + b[0, 2] * x2 + b[0, 3] * x3 + b[0, 4] * x4 + b[0, 5] * x5
                n1 = b[1, 0] * x0 + b[1, 1] * x1 + b[1, 2] * x2 + b[1, 3] * x3 + b[1, 4] * x4 + b[1, 5] * x5
                n2 = b[2, 0] * x0 + b[2, 1] * x1 + b[2, 2] * x2 + b[2, 3] * x3 + b[2, 4] * x4 + b[2, 5] * x5
                n3 = b[3, 0] * x0 + b[3, 1] * x1 + b[3, 2] * x2 + b[3, 3] * x3 + b[3, 4] * x4 + b[3, 5] * x5
                f0 = m[0, 0] * v0 + m[0, 1] * v1 + m[0, 2] * v2 + m[0, 3] * v3
                f1 = m[1, 0] * v0 + m[1, 1] * v1 + m[1, 2] * v2 + m[1, 3] * v3
                f2 = m[2, 0] * v0 + m[2, 1] * v1 + m[2, 2] * v2 + m[2, 3] * v3
                f3 = m[3, 0] * v0 + m[3, 1] * v1 + m[3, 2] * v2 + m[3, 3] * v3
                v0 = v0 - f0 * dt + n0
                v1 = v1 - f1 * dt + n1
                v2 = v2 - f2 * dt + n2
                v3 = v3 - f3 * dt + n3
                if step >= n_burn:
                    acc[:, 0] += v0 * v0
                    acc[:, 1] += v0 * v1
                    acc[:, 2] += v0 * v2
                    acc[:, 3] += v0 * v3
                    acc[:, 4] += v1 * v1
                    acc[:, 5] += v1 * v2
                    acc[:, 6] += v1 * v3
                    acc[:, 7] += v2 * v2
                    acc[:, 8] += v2 * v3
                    acc[:, 9] += v3 * v3
                    cur += d_i
                if record:
                    window += d_i[0]
                    if (step + 1) % rec_every == 0 and n_rec < series.shape[0]:
                        series[n_rec] = ((step + 1) * dt, v0[0], v1[0], v2[0], v3[0], window / (rec_every * dt))
                        window = 0.0
                        n_rec += 1
        acc /= n_avg
        cur /= n_avg * dt
    return moments, current
