"""Experiment runner: every simulation and the forecasting pipeline as a command.

Commands write plot-ready CSV/JSON artifacts plus a ``manifest.json`` with the
echoed configuration and output checksums. Exit codes: 0 success, 2 usage,
3 data validation, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .dataio import RunManifest, ingest_csv, write_forecasts_csv
from .dgp import ArmaDgpSpec, McConfig, StationarityError
from .estimators import ConvergenceError
from .experiments import (
    TSTAT_METHODS,
    estimator_table_rows,
    mc_corr_density,
    mc_eigen_stats,
    mc_estimator_table,
    mc_lasso_ratios,
    mc_tstat_rates,
)
from .forecast import (
    DataValidationError,
    RollingConfig,
    dm_test,
    rmsfe,
    rolling_forecast,
    selection_stats,
    target_transform,
)
from .theory import Ar1PairSpec, density_grid

_DESK_REPS = 500
_PAPER_REPS = 5000
_DESK_ORDER = 3
_PAPER_ORDER = 12


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _resolve(args, name, desk, paper):
    value = getattr(args, name)
    if value is not None:
        return value
    return paper if args.paper_scale else desk


def _outdir(args) -> str:
    out = args.out_dir or os.environ.get("PREWHITEN_OUTDIR") or "."
    os.makedirs(out, exist_ok=True)
    return out


def _write_rows(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(c if isinstance(c, str) else _fmt(c) for c in row) + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_density(args, outdir):
    reps = _resolve(args, "reps", _DESK_REPS, _PAPER_REPS)
    phi1, phi2 = args.phi
    spec = Ar1PairSpec(phi1, phi2, args.T)
    grid = density_grid(spec, args.points)
    theory_path = os.path.join(outdir, "density_theory.csv")
    grid.to_csv(theory_path)

    config = McConfig(replications=reps, T=args.T, base_seed=args.seed, threads=args.threads)
    summary = mc_corr_density(config, ArmaDgpSpec.ar1(phi1, phi2), bins=args.bins)
    mc_path = os.path.join(outdir, "density_mc.csv")
    edges = summary.arrays["hist_edges"]
    centers = 0.5 * (edges[:-1] + edges[1:])
    _write_rows(mc_path, ["c", "density"], list(zip(centers, summary.arrays["hist_density"])))
    if "ks_theory" in summary.scalars:
        print(f"KS distance to closed-form density: {summary.scalars['ks_theory']:.4f}")
    print(f"simulated sd: {summary.scalars['sd']:.4f} over {reps} replications")
    return [theory_path, mc_path]


def cmd_toy_eigen(args, outdir):
    reps = _resolve(args, "reps", _DESK_REPS, _PAPER_REPS)
    config = McConfig(replications=reps, T=args.T, base_seed=args.seed, threads=args.threads)
    rows = []
    for phi in args.phis:
        s = mc_eigen_stats(config, args.n, phi)
        rows.append(
            [
                phi,
                s.scalars["max_offdiag.mean"],
                s.scalars["max_offdiag.sd"],
                s.scalars["min_eigenvalue.mean"],
                s.scalars["min_eigenvalue.sd"],
            ]
        )
        print(
            f"phi={phi:g}: mean max|c| = {rows[-1][1]:.4f}, "
            f"mean min eigenvalue = {rows[-1][3]:.4f}"
        )
    path = os.path.join(outdir, "toy_eigen.csv")
    _write_rows(
        path,
        ["phi", "max_offdiag_mean", "max_offdiag_sd", "min_eigenvalue_mean", "min_eigenvalue_sd"],
        rows,
    )
    return [path]


def cmd_estimators(args, outdir):
    reps = _resolve(args, "reps", _DESK_REPS, 1000)
    config = McConfig(replications=reps, T=args.T, base_seed=args.seed, threads=args.threads)
    summary = mc_estimator_table(config, args.scenario, q_max=args.q_max)
    header, rows = estimator_table_rows(summary)
    table_path = os.path.join(outdir, "estimator_table.csv")
    _write_rows(table_path, header, rows)
    json_path = os.path.join(outdir, "estimator_summary.json")
    summary.arrays = {}
    summary.to_json(json_path)
    for m in ("NW", "CO", "DynReg", "uOLS"):
        print(
            f"{m}: coefficient error {summary.scalars[f'{m}.err.ave']:.3f}, "
            f"R2 {summary.scalars[f'{m}.r2.ave']:.3f}"
        )
    return [table_path, json_path]


def cmd_lasso_sim(args, outdir):
    reps = _resolve(args, "reps", 200, 1000)
    config = McConfig(replications=reps, T=args.T, base_seed=args.seed, threads=args.threads)
    rows = []
    for phi in args.phis:
        s = mc_lasso_ratios(config, args.n, phi, p_max=args.p_max, q_max=args.q_max)
        rows.append(
            [
                phi,
                s.scalars["eigen_ratio.mean"],
                s.scalars["eigen_ratio.sd"],
                s.scalars["err_ratio.mean"],
                s.scalars["err_ratio.sd"],
                s.scalars["n_selected_x.mean"],
                s.scalars["n_selected_u.mean"],
            ]
        )
        print(
            f"phi={phi:g}: eigenvalue ratio {rows[-1][1]:.3f}, "
            f"coefficient-error ratio {rows[-1][3]:.3f}"
        )
    path = os.path.join(outdir, "lasso_ratios.csv")
    _write_rows(
        path,
        [
            "phi",
            "eigen_ratio_mean",
            "eigen_ratio_sd",
            "err_ratio_mean",
            "err_ratio_sd",
            "n_selected_x_mean",
            "n_selected_u_mean",
        ],
        rows,
    )
    return [path]


def cmd_tstat(args, outdir):
    reps = _resolve(args, "reps", _DESK_REPS, _PAPER_REPS)
    config = McConfig(replications=reps, T=args.T, base_seed=args.seed, threads=args.threads)
    rows = []
    for phi in args.phis:
        s = mc_tstat_rates(config, phi)
        rates = [s.scalars[f"{m}.reject_rate"] for m in TSTAT_METHODS]
        rows.append([phi] + rates)
        print(
            f"phi={phi:g}: "
            + ", ".join(f"{m} {100 * r:.2f}%" for m, r in zip(TSTAT_METHODS, rates))
        )
    path = os.path.join(outdir, "tstat_rates.csv")
    _write_rows(path, ["phi"] + [f"{m}_rate" for m in TSTAT_METHODS], rows)
    return [path]


def cmd_forecast(args, outdir):
    res = ingest_csv(args.data)
    names = list(res.panel.names)
    if args.target not in names:
        raise DataValidationError(f"target column {args.target!r} not in the panel")
    j = names.index(args.target)
    tt = target_transform(res.raw[:, j], args.h)

    d0 = max(res.rows_dropped, tt.offset)
    y = tt.regressand[d0 - tt.offset :]
    target = tt.target[d0 - tt.offset :]
    cov = np.delete(res.panel.values, j, axis=1)[d0 - res.rows_dropped :]
    dates = res.raw_dates[d0:]

    p_max = _resolve(args, "p_max", _DESK_ORDER, _PAPER_ORDER)
    q_max = args.q_max if args.q_max is not None else (_PAPER_ORDER if args.paper_scale else 0)
    cfg = RollingConfig(
        window=args.window,
        horizon=args.h,
        y_lag_max=args.y_lag_max,
        p_max=p_max,
        q_max=q_max,
    )
    results = {}
    for m in args.methods:
        results[m] = rolling_forecast(y, cov, m, cfg, target=target)
        print(f"{m}: RMSFE {rmsfe(results[m]):.4f} over {len(results[m].origins)} origins")

    fc_path = os.path.join(outdir, "forecasts.csv")
    realization_dates = [dates[k + args.h] for k in results[args.methods[0]].origins]
    write_forecasts_csv(fc_path, realization_dates, results)

    summary = {"rmsfe": {m: rmsfe(r) for m, r in results.items()}}
    pairs = [(a, b) for i, a in enumerate(args.methods) for b in args.methods[i + 1 :]]
    summary["comparisons"] = []
    for a, b in pairs:
        # small p: evidence that method_2 forecasts worse than method_1
        dm = dm_test(results[b].errors, results[a].errors, h=args.h)
        summary["comparisons"].append(
            {
                "method_1": a,
                "method_2": b,
                "rmsfe_ratio": rmsfe(results[a]) / rmsfe(results[b]),
                "dm_statistic": dm.statistic,
                "p_method_2_less_accurate": dm.p_value_one_sided,
            }
        )
    if "LASSO" in results and "uLASSO" in results:
        summary["selection"] = selection_stats(results["LASSO"], results["uLASSO"])
    sm_path = os.path.join(outdir, "summary.json")
    with open(sm_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return [fc_path, sm_path]


def cmd_ingest_check(args, outdir):
    res = ingest_csv(args.data)
    print(f"columns: {len(res.panel.names)}")
    print(f"raw rows: {res.raw.shape[0]}")
    print(f"rows dropped by differencing: {res.rows_dropped}")
    print(f"aligned rows: {res.panel.n_obs}")
    for name, code in zip(res.panel.names, res.panel.tcodes):
        print(f"  {name}: tcode {code}")
    return []


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--out-dir", default=None, help="output directory (or $PREWHITEN_OUTDIR)")
    p.add_argument("--seed", type=int, default=0, help="base seed for replication streams")
    p.add_argument("--threads", type=int, default=1, help="worker threads for replications")
    p.add_argument("--config", default=None, help="JSON or key=value config file; flags override")
    p.add_argument("--paper-scale", action="store_true", help="full replication counts and order maxima")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prewhiten",
        description="Spurious-correlation experiments and prewhitened forecasting",
    )
    parser.add_argument("--version", action="version", version=f"prewhiten {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="closed-form and simulated correlation densities")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--phi", type=float, nargs=2, required=True, metavar=("PHI1", "PHI2"))
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--points", type=int, default=5000)
    p.add_argument("--bins", type=int, default=101)
    _add_common(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("toy-eigen", help="max off-diagonal and min eigenvalue against phi")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--T", type=int, default=100)
    p.add_argument("--phis", type=float, nargs="+", default=[0.0, 0.3, 0.6, 0.9, 0.95])
    p.add_argument("--reps", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_toy_eigen)

    p = sub.add_parser("estimators", help="estimator comparison table")
    p.add_argument("--scenario", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--T", type=int, default=100)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--q-max", type=int, default=0, help="MA order cap for the residual filter")
    _add_common(p)
    p.set_defaults(func=cmd_estimators)

    p = sub.add_parser("lasso-sim", help="eigenvalue and coefficient-error ratios")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--T", type=int, default=100)
    p.add_argument("--phis", type=float, nargs="+", default=[0.3, 0.6, 0.9, 0.95])
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--p-max", type=int, default=3)
    p.add_argument("--q-max", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_lasso_sim)

    p = sub.add_parser("tstat", help="spurious-regression rejection rates")
    p.add_argument("--T", type=int, default=100)
    p.add_argument("--phis", "--phi", dest="phis", type=float, nargs="+", default=[0.0, 0.3, 0.6, 0.9, 0.95])
    p.add_argument("--reps", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_tstat)

    p = sub.add_parser("forecast", help="rolling-window forecast comparison on a panel CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--target", required=True, help="name of the level series to forecast")
    p.add_argument("--h", type=int, default=24)
    p.add_argument("--window", type=int, default=130)
    p.add_argument("--y-lag-max", type=int, default=12)
    p.add_argument("--p-max", type=int, default=None)
    p.add_argument("--q-max", type=int, default=None)
    p.add_argument("--methods", nargs="+", default=["AR", "LASSO", "uLASSO"], choices=["AR", "LASSO", "uLASSO"])
    _add_common(p)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("ingest-check", help="validate a panel CSV and report transformations")
    p.add_argument("--data", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_ingest_check)

    return parser


def _load_config_file(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        cfg = json.loads(text)
        if not isinstance(cfg, dict):
            raise DataValidationError("config file must hold a JSON object")
        return cfg
    except json.JSONDecodeError:
        cfg = {}
        for i, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataValidationError(f"config line {i}: expected key=value")
            key, _, value = line.partition("=")
            try:
                cfg[key.strip()] = json.loads(value.strip())
            except json.JSONDecodeError:
                cfg[key.strip()] = value.strip()
        return cfg


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # flags override config-file values: load the file first, use as defaults
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        try:
            overrides = _load_config_file(cfg_path)
        except (OSError, DataValidationError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
        for action in parser._subparsers._group_actions[0].choices.values():
            known = {a.dest for a in action._actions}
            action.set_defaults(**{k: v for k, v in overrides.items() if k in known})
    args = parser.parse_args(argv)

    t0 = time.time()
    try:
        outdir = _outdir(args)
        outputs = args.func(args, outdir)
    except DataValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConvergenceError, StationarityError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3

    config_echo = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = RunManifest(
        command=args.command,
        config=config_echo,
        wall_clock_s=round(time.time() - t0, 3),
        version=__version__,
    )
    for path in outputs:
        manifest.add_output(path)
    manifest.write(os.path.join(outdir, "manifest.json"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
