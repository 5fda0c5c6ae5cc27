#!/usr/bin/env python3
"""Time the numba and numpy Monte-Carlo backends on the same ensemble.

    python3 benchmarks/bench_kernels.py --trajectories 512 --horizon 10
"""

import argparse
import time

import numpy as np

from cvfeedback import SimConfig, make_params, simulate_ensemble
from cvfeedback._kernels import available_backends


def run(backend, p, cfg):
    t0 = time.perf_counter()
    stats = simulate_ensemble(p, cfg, backend=backend)
    return stats, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--chi", type=float, default=0.3)
    ap.add_argument("--eta", type=float, default=0.7)
    ap.add_argument("--lam", type=float, default=-0.2)
    ap.add_argument("--trajectories", type=int, default=512)
    ap.add_argument("--horizon", type=float, default=10.0)
    ap.add_argument("--burn-in", type=float, default=10.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    args = ap.parse_args()

    p = make_params(args.chi, args.eta, args.lam)
    cfg = SimConfig(dt=args.dt, burn_in=args.burn_in, horizon=args.horizon, n_traj=args.trajectories, seed=1)
    steps = args.trajectories * (cfg.burn_steps + cfg.avg_steps)
    backends = available_backends()
    print(f"backends: {', '.join(backends)}; {steps:.3g} trajectory steps")

    results = {}
    for name in backends:
        if name == "numba":
            # compile (or load the cache) outside the timed run
            run(name, p, SimConfig(dt=args.dt, burn_in=0.01, horizon=0.01, n_traj=2))
        stats, elapsed = run(name, p, cfg)
        results[name] = stats
        print(f"{name:>6}: {elapsed:8.3f} s  {1e9 * elapsed / steps:7.1f} ns/step")

    if len(results) == 2:
        a, b = results["numba"], results["numpy"]
        diff = max(np.max(np.abs(a.gamma_hat - b.gamma_hat)), abs(a.mean_current - b.mean_current))
        print(f"max |numba - numpy| over moments and current: {diff:.3g}")


if __name__ == "__main__":
    main()
