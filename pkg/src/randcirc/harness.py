"""Ensemble orchestration: seeded parallel realizations and CSV emission.

Realization r always draws from RngStream(master_seed, r) (clifford-compare
splits even/odd stream ids between its two circuits), rows are assembled in
ascending realization order, and summaries are exact functions of the row
set, so a run's CSV output is byte-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .circuits import evolve
from .config import ExperimentConfig
from .measurement import weak_branch_tables
from .metrics import MetricSeries, SaturationResult, detect_saturation, fit_tanh, ggm, ipr
from .records import (
    RunRow,
    SummaryRow,
    read_summary_csv,
    summarize,
    summary_curve,
    write_rows_csv,
    write_summary_csv,
)
from .rmps import mps_to_statevector, sample_rmps
from .sampling import RngStream
from .state import new_basis_state

_METRIC_FNS = {"ggm": ggm, "ipr": ipr}


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[RunRow]
    summary: list[SummaryRow]
    rows_path: str = ""
    summary_path: str = ""

    def series(self, metric: str) -> MetricSeries:
        xs, mean, stderr = summary_curve(self.summary, metric)
        count = next(r.count for r in self.summary if r.metric == metric)
        return MetricSeries(metric, np.array(xs), np.array(mean), np.array(stderr), count)


def summary_path_for(rows_path: str | Path) -> Path:
    p = Path(rows_path)
    return p.with_name(p.stem + ".summary" + (p.suffix or ".csv"))


def _growth_rows(cfg: ExperimentConfig, layout: str, metrics, r: int, stream_id: int, tag: str = "") -> list[RunRow]:
    rng = RngStream(cfg.master_seed, stream_id)
    state = new_basis_state(cfg.num_qubits, "0" * cfg.num_qubits)
    rows: list[RunRow] = []

    def observer(t, st):
        for name in metrics:
            rows.append(RunRow(float(t), name + tag, r, _METRIC_FNS[name](st)))

    evolve(state, layout, cfg.t_max, rng, observer)
    return rows


def _rmps_rows(cfg: ExperimentConfig, r: int) -> list[RunRow]:
    rng = RngStream(cfg.master_seed, r)
    rows = []
    for d in cfg.rmps_d_grid:
        chain = sample_rmps(rng, cfg.num_qubits, d, cfg.rmps_flavor)
        rows.append(RunRow(float(d), "ggm", r, ggm(mps_to_statevector(chain))))
    return rows


def _weak_rows(cfg: ExperimentConfig, r: int) -> list[RunRow]:
    rng = RngStream(cfg.master_seed, r)
    n = cfg.num_qubits
    state = new_basis_state(n, "0" * n)
    evolve(state, cfg.layout, cfg.weak_t_equil, rng)
    sites = rng.gen.integers(n, size=cfg.weak_trials)
    if cfg.weak_mode == "independent":
        p_tab, g_tab = weak_branch_tables(state, cfg.weak_lambda_grid)
        site_vals = (p_tab * g_tab).sum(axis=2)  # (n_sites, n_lambda)
        trial_means = site_vals[sites].mean(axis=0)
    else:
        from .measurement import WeakMeasurementPair, _site_plus_probability, apply_weak_measurement

        trial_means = np.zeros(len(cfg.weak_lambda_grid))
        for li, lam in enumerate(cfg.weak_lambda_grid):
            pair = WeakMeasurementPair(lam)
            cur = state.copy()
            vals = []
            for site0 in sites:
                p_plus = _site_plus_probability(cur, int(site0) + 1, lam)
                outcome = "plus" if rng.gen.random() < p_plus else "minus"
                cur, _ = apply_weak_measurement(cur, int(site0) + 1, pair, outcome)
                vals.append(ggm(cur))
            trial_means[li] = np.mean(vals)
    return [
        RunRow(float(lam), "ggm_weak", r, float(trial_means[li]))
        for li, lam in enumerate(cfg.weak_lambda_grid)
    ]


def _realization_rows(cfg: ExperimentConfig, r: int) -> list[RunRow]:
    if cfg.experiment == "ggm-growth":
        return _growth_rows(cfg, cfg.layout, cfg.metrics, r, r)
    if cfg.experiment == "ipr-growth":
        return _growth_rows(cfg, cfg.layout, ("ipr",), r, r)
    if cfg.experiment == "clifford-compare":
        rows = _growth_rows(cfg, "brick", cfg.metrics, r, 2 * r, tag="[brick]")
        rows += _growth_rows(cfg, "clifford", cfg.metrics, r, 2 * r + 1, tag="[clifford]")
        return rows
    if cfg.experiment == "rmps-sweep":
        return _rmps_rows(cfg, r)
    if cfg.experiment == "weak-sweep":
        return _weak_rows(cfg, r)
    raise ValueError(f"unknown experiment {cfg.experiment!r}")


def _worker(task: tuple[ExperimentConfig, int]) -> list[RunRow]:
    return _realization_rows(*task)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run all realizations (optionally across a worker pool) and emit CSVs."""
    cfg.validate()
    tasks = [(cfg, r) for r in range(cfg.realizations)]
    if cfg.workers == 1:
        chunks = [_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_worker, tasks, chunksize=max(1, cfg.realizations // (cfg.workers * 4))))
    rows = [row for chunk in chunks for row in chunk]
    summary = summarize(rows)
    result = ExperimentResult(cfg, rows, summary)
    if cfg.out:
        write_rows_csv(rows, cfg.out)
        spath = summary_path_for(cfg.out)
        write_summary_csv(summary, spath)
        result.rows_path = str(cfg.out)
        result.summary_path = str(spath)
    return result


# -- saturation & fit reporting ----------------------------------------------


def saturation_rule(metric: str, num_qubits: int, decimals: int) -> tuple[int, float]:
    """(decimals, scale) for rounding-stability detection per metric.

    Multipartite entanglement saturates on an O(1) scale and uses the raw
    configured decimals.  Delocalization lives on the 2^(N-1) scale; it is
    rounded at two decimals of value*1e-3 at N=12 and the scale shifts by
    2 per qubit so the relative granularity stays put across system sizes.
    """
    if metric.startswith("ipr"):
        return 2, 1e-3 * 2.0 ** (12 - num_qubits)
    return decimals, 1.0


def saturation_from_summary(
    summary: Sequence[SummaryRow],
    metric: str,
    num_qubits: int,
    decimals: int = 3,
) -> SaturationResult:
    xs, mean, _ = summary_curve(summary, metric)
    dec, scale = saturation_rule(metric, num_qubits, decimals)
    return detect_saturation(mean, dec, abscissa=xs, scale=scale)


@dataclass
class FitReport:
    metric: str
    sat_value: float
    sat_at: float | None
    t0: float
    abscissa: np.ndarray
    ratio: np.ndarray  # G(t) / sat_value
    delta: np.ndarray  # |ratio - tanh(t/t0)|


def fit_growth_curve(
    summary: Sequence[SummaryRow],
    metric: str = "ggm",
    num_qubits: int = 12,
    decimals: int = 3,
) -> FitReport:
    """Saturation detection plus the tanh growth-law fit of one summary curve."""
    xs, mean, _ = summary_curve(summary, metric)
    sat = saturation_from_summary(summary, metric, num_qubits, decimals)
    t0, delta = fit_tanh(mean, sat.value, abscissa=xs)
    return FitReport(
        metric,
        sat.value,
        sat.sat_at,
        t0,
        np.asarray(xs),
        np.asarray(mean) / sat.value,
        delta,
    )


def fit_summary_file(path: str | Path, metric: str = "ggm", num_qubits: int = 12, decimals: int = 3) -> FitReport:
    return fit_growth_curve(read_summary_csv(path), metric, num_qubits, decimals)


# -- scaling sweeps -----------------------------------------------------------


@dataclass(frozen=True)
class ScalingRow:
    num_qubits: int
    experiment: str
    layout: str
    metric: str
    sat_value: float
    sat_at: float | None


def scaling_sweep(cfg: ExperimentConfig, n_list: Sequence[int] | None = None) -> list[ScalingRow]:
    """Per-N saturation pairs (value, t_sat or D_sat) for the configured experiment."""
    sizes = tuple(n_list) if n_list else (cfg.n_list or (4, 6, 8, 10, 12))
    rows: list[ScalingRow] = []
    for n in sizes:
        sub = replace(cfg, num_qubits=n, n_list=(), out="")
        result = run_experiment(sub)
        metrics = sorted({r.metric for r in result.summary})
        for metric in metrics:
            sat = saturation_from_summary(result.summary, metric, n, cfg.saturation_decimals)
            rows.append(ScalingRow(n, cfg.experiment, cfg.layout, metric, sat.value, sat.sat_at))
    return rows


def write_scaling_csv(rows: Sequence[ScalingRow], path: str | Path) -> None:
    from .records import _write_csv, format_float

    _write_csv(
        path,
        ["n", "experiment", "layout", "metric", "sat_value", "sat_at"],
        (
            [
                str(r.num_qubits),
                r.experiment,
                r.layout,
                r.metric,
                format_float(r.sat_value),
                "" if r.sat_at is None else format_float(r.sat_at),
            ]
            for r in rows
        ),
    )


def read_scaling_csv(path: str | Path) -> list[ScalingRow]:
    from .records import _read_csv

    return [
        ScalingRow(int(n), exp, layout, metric, float(sv), None if sa == "" else float(sa))
        for n, exp, layout, metric, sv, sa in _read_csv(path, ["n", "experiment", "layout", "metric", "sat_value", "sat_at"])
    ]
