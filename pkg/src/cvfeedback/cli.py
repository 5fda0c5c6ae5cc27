"""Command-line interface: ``cvfeedback {steady,optimize,sweep,simulate}``.

Exit codes: 0 ok, 2 bad arguments, 3 unstable or unphysical state,
4 Monte-Carlo estimate disagrees with the analytic steady state.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .entanglement import entanglement_report, is_physical
from .errors import InstabilityError, ParameterError
from .model import ModelParams, stability_margin
from .optimizer import OptimizerConfig, maximize_log_negativity
from .steady_state import closed_form_covariance, epr_variance
from .trajectory import SimConfig, simulate_ensemble, write_series, z_scores

EXIT_OK, EXIT_USAGE, EXIT_UNSTABLE, EXIT_VALIDATION = 0, 2, 3, 4
Z_LIMIT = 4.0
SWEEP_FIELDS = ("chi", "eta", "lambda_star", "l_fb", "l_nofb", "epr_variance_nofb", "zeta")
COORDS = ("x1", "y1", "x2", "y2")
ENTRY_NAMES = tuple(f"{COORDS[i]}{COORDS[j]}" for i, j in _kernels.MOMENT_PAIRS)


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return "%.12g" % float(x)


@dataclass(frozen=True)
class SweepRecord:
    chi: float
    eta: float
    lambda_star: float
    l_fb: float
    l_nofb: float
    epr_variance_nofb: float
    zeta: float

    def csv_row(self) -> str:
        return ",".join(fmt(getattr(self, f)) for f in SWEEP_FIELDS)


def sweep_record(chi: float, eta: float, cfg: OptimizerConfig) -> SweepRecord:
    res = maximize_log_negativity(chi, eta, cfg)
    g_star = closed_form_covariance(ModelParams(chi, eta, res.lambda_star), min_margin=cfg.margin)
    g0 = closed_form_covariance(ModelParams(chi, eta, 0.0), min_margin=cfg.margin)
    return SweepRecord(
        chi=chi,
        eta=eta,
        lambda_star=res.lambda_star,
        l_fb=res.l_fb,
        l_nofb=res.l_nofb,
        epr_variance_nofb=epr_variance(g0),
        zeta=entanglement_report(g_star).zeta,
    )


def sweep_records(chis, etas, cfg: OptimizerConfig) -> list[SweepRecord]:
    """Chi-major grid of optimized records."""
    return [sweep_record(float(c), float(e), cfg) for c in chis for e in etas]


def sweep_csv(records) -> str:
    buf = io.StringIO()
    buf.write(",".join(SWEEP_FIELDS) + "\n")
    for r in records:
        buf.write(r.csv_row() + "\n")
    return buf.getvalue()


def _eta_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed eta list {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty eta list")
    return vals


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvfeedback", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def model_flags(sp, lam=True):
        sp.add_argument("--chi", type=float, required=True)
        sp.add_argument("--eta", type=float, required=True)
        if lam:
            sp.add_argument("--lambda", dest="lam", type=float, default=0.0)

    def optimizer_flags(sp):
        sp.add_argument("--grid-points", type=_positive_int, default=OptimizerConfig.grid_points)
        sp.add_argument("--tol", type=float, default=OptimizerConfig.tol)
        sp.add_argument("--margin", type=float, default=OptimizerConfig.margin)

    sp = sub.add_parser("steady", help="steady state at one (chi, eta, lambda)")
    model_flags(sp)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("optimize", help="maximize log negativity over lambda")
    model_flags(sp, lam=False)
    optimizer_flags(sp)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("sweep", help="optimized log negativity on a (chi, eta) grid")
    sp.add_argument("--chi-min", type=float, default=0.01)
    sp.add_argument("--chi-max", type=float, default=0.49)
    sp.add_argument("--chi-steps", type=_positive_int, default=49)
    sp.add_argument("--eta-list", type=_eta_list, default=_eta_list("0,0.3,0.5,0.7,0.99"))
    sp.add_argument("--out", default=None, help="CSV path (default: stdout)")
    optimizer_flags(sp)

    sp = sub.add_parser("simulate", help="Monte-Carlo check of the steady covariance")
    model_flags(sp)
    defaults = SimConfig()
    sp.add_argument("--dt", type=float, default=defaults.dt)
    sp.add_argument("--burn-in", type=float, default=defaults.burn_in)
    sp.add_argument("--horizon", type=float, default=defaults.horizon)
    sp.add_argument("--trajectories", type=_positive_int, default=defaults.n_traj)
    sp.add_argument("--seed", type=int, default=defaults.seed)
    sp.add_argument("--workers", type=_positive_int, default=1)
    sp.add_argument("--backend", choices=_kernels.available_backends(), default=None)
    sp.add_argument("--dump-series", metavar="PREFIX", default=None,
                    help="write PREFIX_<observable>.txt (time, value) for trajectory 0")
    sp.add_argument("--record-every", type=_positive_int, default=100,
                    help="steps between dumped samples")
    return parser


def _unstable_message(p: ModelParams) -> str:
    if p.chi >= 0.5:
        return "unstable: chi >= 1/2"
    return f"unstable: lambda >= (1/2 + chi)/2 (stability margin {stability_margin(p):.6g})"


def cmd_steady(args, out) -> int:
    p = ModelParams(args.chi, args.eta, args.lam)
    g = closed_form_covariance(p)
    rep = entanglement_report(g)
    physical = is_physical(g)
    G = g.gamma_full
    fields = {
        "chi": p.chi, "eta": p.eta, "lambda": p.lam,
        "zeta": rep.zeta, "log_negativity": rep.log_negativity,
        "epr_variance": rep.epr_variance, "stability_margin": stability_margin(p),
        "nu_min": rep.nu_min, "physical": physical,
    }
    if args.format == "json":
        doc = {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v)) for k, v in fields.items()}
        doc["gamma"] = G.tolist()
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        gamma_cols = {f"g_{name}": G[i, j] for name, (i, j) in zip(ENTRY_NAMES, _kernels.MOMENT_PAIRS)}
        row = {**fields, **gamma_cols}
        out.write(",".join(row) + "\n")
        out.write(",".join(fmt(v) for v in row.values()) + "\n")
    if not physical:
        print("unphysical: steady covariance violates the uncertainty principle", file=sys.stderr)
        return EXIT_UNSTABLE
    return EXIT_OK


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(grid_points=args.grid_points, tol=args.tol, margin=args.margin)


def cmd_optimize(args, out) -> int:
    ModelParams(args.chi, args.eta, 0.0)
    rec = sweep_record(args.chi, args.eta, _optimizer_config(args))
    if args.format == "json":
        out.write(json.dumps(asdict(rec), indent=2) + "\n")
    else:
        out.write(sweep_csv([rec]))
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    if args.chi_steps == 1:
        chis = np.array([args.chi_min])
    else:
        chis = np.linspace(args.chi_min, args.chi_max, args.chi_steps)
    for c in chis:
        for e in args.eta_list:
            ModelParams(float(c), e, 0.0)
    text = sweep_csv(sweep_records(chis, args.eta_list, _optimizer_config(args)))
    if args.out:
        with open(args.out, "w", newline="\n", encoding="ascii") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    p = ModelParams(args.chi, args.eta, args.lam)
    cfg = SimConfig(
        dt=args.dt, burn_in=args.burn_in, horizon=args.horizon, n_traj=args.trajectories,
        seed=args.seed, workers=args.workers,
        record_every=args.record_every if args.dump_series else 0,
    )
    stats = simulate_ensemble(p, cfg, backend=args.backend)
    analytic = closed_form_covariance(p).gamma_full
    z = z_scores(stats, analytic)
    iu = np.triu_indices(4)
    out.write(f"# chi={fmt(p.chi)} eta={fmt(p.eta)} lambda={fmt(p.lam)}\n")
    out.write(f"# dt={fmt(cfg.dt)} burn_in={fmt(cfg.burn_in)} horizon={fmt(cfg.horizon)} "
              f"trajectories={cfg.n_traj} seed={cfg.seed}\n")
    out.write("entry,estimate,stderr,analytic,z\n")
    for name, est, se, ref, zz in zip(ENTRY_NAMES, stats.gamma_hat[iu], stats.stderr[iu], analytic[iu], z):
        out.write(f"{name},{fmt(est)},{fmt(se)},{fmt(ref)},{fmt(zz)}\n")
    epr_ref = epr_variance(closed_form_covariance(p))
    out.write(f"epr_variance,{fmt(stats.epr_variance)},{fmt(stats.epr_stderr)},{fmt(epr_ref)},"
              f"{fmt((stats.epr_variance - epr_ref) / stats.epr_stderr)}\n")
    out.write(f"mean_current,{fmt(stats.mean_current)},{fmt(stats.mean_current_stderr)},0,"
              f"{fmt(stats.mean_current / stats.mean_current_stderr)}\n")
    max_z = float(np.nanmax(np.abs(z)))
    out.write(f"# max |z| over covariance entries: {fmt(max_z)} (limit {fmt(Z_LIMIT)})\n")
    if args.dump_series:
        for path in write_series(stats, args.dump_series):
            print(f"wrote {path}", file=sys.stderr)
    if not max_z <= Z_LIMIT:
        print(f"validation failed: max |z| = {max_z:.3f} > {Z_LIMIT}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


COMMANDS = {"steady": cmd_steady, "optimize": cmd_optimize, "sweep": cmd_sweep, "simulate": cmd_simulate}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InstabilityError:
        p = ModelParams(args.chi, args.eta, getattr(args, "lam", 0.0))
        print(_unstable_message(p), file=sys.stderr)
        return EXIT_UNSTABLE


if __name__ == "__main__":
    sys.exit(main())
