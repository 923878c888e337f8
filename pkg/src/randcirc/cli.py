"""Command-line interface: run, fit, match-dmin, and scaling subcommands."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import fields

import numpy as np

from .config import EXPERIMENTS, ExperimentConfig, config_from_ini
from .harness import (
    fit_summary_file,
    run_experiment,
    saturation_from_summary,
    scaling_sweep,
    summary_path_for,
    write_scaling_csv,
)
from .records import SummaryRow, format_float, read_summary_csv, summary_curve, write_summary_csv, _write_csv
from .rmps import match_min_bond_dimension


def _add_run_like_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI config file; flags override its values")
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--layout", choices=("brick", "star", "allpairs", "clifford"))
    p.add_argument("--n", type=int, dest="num_qubits")
    p.add_argument("--t-max", type=int, dest="t_max")
    p.add_argument("--realizations", type=int)
    p.add_argument("--seed", type=int, dest="master_seed")
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.add_argument("--profile", choices=("ci", "paper"))
    p.add_argument("--metrics", help="comma-separated subset of ggm,ipr")
    p.add_argument("--decimals", type=int, dest="saturation_decimals")
    p.add_argument("--flavor", choices=("unitary", "ginibre"), dest="rmps_flavor")
    p.add_argument("--d-grid", help="comma-separated bond dimensions", dest="rmps_d_grid")
    p.add_argument("--lambda-grid", help="comma-separated measurement strengths", dest="weak_lambda_grid")
    p.add_argument("--trials", type=int, dest="weak_trials")
    p.add_argument("--weak-mode", choices=("independent", "sequential"), dest="weak_mode")
    p.add_argument("--t-equil", type=int, dest="weak_t_equil")


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = config_from_ini(args.config) if args.config else ExperimentConfig()
    if args.profile:
        cfg = cfg.with_profile(args.profile)
    parsers = {
        "metrics": lambda s: tuple(s.split(",")),
        "rmps_d_grid": lambda s: tuple(int(t) for t in s.split(",")),
        "weak_lambda_grid": lambda s: tuple(float(t) for t in s.split(",")),
    }
    for f in fields(ExperimentConfig):
        value = getattr(args, f.name, None)
        if value is None or f.name == "profile":
            continue
        setattr(cfg, f.name, parsers.get(f.name, lambda v: v)(value) if isinstance(value, str) and f.name in parsers else value)
    if "RANDCIRC_WORKERS" in os.environ and args.workers is None:
        cfg.workers = int(os.environ["RANDCIRC_WORKERS"])
    return cfg.validate()


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    result = run_experiment(cfg)
    for metric in sorted({r.metric for r in result.summary}):
        sat = saturation_from_summary(result.summary, metric, cfg.num_qubits, cfg.saturation_decimals)
        where = "never" if sat.sat_at is None else format_float(sat.sat_at)
        print(f"{cfg.experiment} {metric}: sat_value={format_float(sat.value)} sat_at={where}")
    if result.rows_path:
        print(f"rows: {result.rows_path}")
        print(f"summary: {result.summary_path}")
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    report = fit_summary_file(args.summary, args.metric, args.n, args.decimals)
    print(f"sat_value={format_float(report.sat_value)}")
    print(f"sat_at={'never' if report.sat_at is None else format_float(report.sat_at)}")
    print(f"t0={format_float(report.t0)}")
    print(f"max_delta={format_float(float(report.delta.max()))}")
    if args.out:
        _write_csv(
            args.out,
            ["abscissa", "ratio", "delta"],
            (
                [format_float(t), format_float(y), format_float(d)]
                for t, y, d in zip(report.abscissa, report.ratio, report.delta)
            ),
        )
        print(f"fit series: {args.out}")
    return 0


def _cmd_match_dmin(args: argparse.Namespace) -> int:
    ts, ru_mean, _ = summary_curve(read_summary_csv(args.ru), args.metric)
    ds, rmps_mean, _ = summary_curve(read_summary_csv(args.rmps), "ggm")
    matches = match_min_bond_dimension(ru_mean, ds, rmps_mean, tol=args.tol)
    lines = []
    for t, g, d in zip(ts, ru_mean, matches):
        lines.append([format_float(t), format_float(g), "" if d is None else str(d)])
        print(f"t={t:g} G={g:.4f} D_min={'none' if d is None else d}")
    if args.out:
        _write_csv(args.out, ["abscissa", "value", "d_min"], lines)
        print(f"match table: {args.out}")
    return 0


def _cmd_scaling(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    n_list = tuple(int(t) for t in args.n_list.split(",")) if args.n_list else None
    rows = scaling_sweep(cfg, n_list)
    for row in rows:
        where = "never" if row.sat_at is None else format_float(row.sat_at)
        print(f"N={row.num_qubits} {row.metric}: sat_value={format_float(row.sat_value)} sat_at={where}")
    if args.out:
        write_scaling_csv(rows, args.out)
        print(f"scaling table: {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="randcirc",
        description="Random-circuit multipartite entanglement experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment ensemble and emit CSVs")
    _add_run_like_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_fit = sub.add_parser("fit", help="saturation + tanh growth fit of a summary CSV")
    p_fit.add_argument("--summary", required=True)
    p_fit.add_argument("--metric", default="ggm")
    p_fit.add_argument("--n", type=int, default=12)
    p_fit.add_argument("--decimals", type=int, default=3)
    p_fit.add_argument("--out")
    p_fit.set_defaults(func=_cmd_fit)

    p_match = sub.add_parser("match-dmin", help="minimum bond dimension matching a circuit curve")
    p_match.add_argument("--ru", required=True, help="circuit-growth summary CSV")
    p_match.add_argument("--rmps", required=True, help="RMPS sweep summary CSV")
    p_match.add_argument("--metric", default="ggm")
    p_match.add_argument("--tol", type=float, default=1e-2)
    p_match.add_argument("--out")
    p_match.set_defaults(func=_cmd_match_dmin)

    p_scal = sub.add_parser("scaling", help="saturation pairs across system sizes")
    _add_run_like_flags(p_scal)
    p_scal.add_argument("--n-list", help="comma-separated system sizes")
    p_scal.set_defaults(func=_cmd_scaling)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface a clean diagnostic, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
