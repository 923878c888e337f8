"""Run-record CSV schemas with exact-round-trip float serialization.

Per-realization rows use the columns ``abscissa,metric,realization,value``;
summary files use ``abscissa,metric,mean,stderr,count``.  Floats are written
with 17 significant digits so that write-then-read is bit-exact, and files
are UTF-8 with LF line endings.  Writes go to a temporary file that is
atomically renamed on completion, so an interrupted run never leaves a
partial output behind.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

ROW_HEADER = ["abscissa", "metric", "realization", "value"]
SUMMARY_HEADER = ["abscissa", "metric", "mean", "stderr", "count"]


@dataclass(frozen=True)
class RunRow:
    abscissa: float
    metric: str
    realization: int
    value: float


@dataclass(frozen=True)
class SummaryRow:
    abscissa: float
    metric: str
    mean: float
    stderr: float
    count: int


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _atomic_writer(path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path, path.with_name(path.name + ".tmp")


def _write_csv(path: str | Path, header: Sequence[str], lines: Iterable[Sequence[str]]) -> None:
    final, tmp = _atomic_writer(path)
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(lines)
    os.replace(tmp, final)


def write_rows_csv(rows: Iterable[RunRow], path: str | Path) -> None:
    _write_csv(
        path,
        ROW_HEADER,
        (
            [format_float(r.abscissa), r.metric, str(r.realization), format_float(r.value)]
            for r in rows
        ),
    )


def write_summary_csv(rows: Iterable[SummaryRow], path: str | Path) -> None:
    _write_csv(
        path,
        SUMMARY_HEADER,
        (
            [format_float(r.abscissa), r.metric, format_float(r.mean), format_float(r.stderr), str(r.count)]
            for r in rows
        ),
    )


def _read_csv(path: str | Path, header: Sequence[str]) -> list[list[str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got != list(header):
            raise ValueError(f"{path}: expected header {','.join(header)}, got {got}")
        return [line for line in reader if line]


def read_rows_csv(path: str | Path) -> list[RunRow]:
    return [
        RunRow(float(a), m, int(r), float(v))
        for a, m, r, v in _read_csv(path, ROW_HEADER)
    ]


def read_summary_csv(path: str | Path) -> list[SummaryRow]:
    return [
        SummaryRow(float(a), m, float(mean), float(se), int(c))
        for a, m, mean, se, c in _read_csv(path, SUMMARY_HEADER)
    ]


def summarize(rows: Sequence[RunRow]) -> list[SummaryRow]:
    """Per-(metric, abscissa) mean and standard error of the mean.

    Values are reduced in ascending realization order regardless of how the
    rows were produced, so the summary is a deterministic function of the
    row set (workers and scheduling cannot perturb it).
    """
    groups: dict[tuple[str, float], list[RunRow]] = {}
    for row in rows:
        groups.setdefault((row.metric, row.abscissa), []).append(row)
    out = []
    for (metric, abscissa) in sorted(groups):
        vals = [r.value for r in sorted(groups[(metric, abscissa)], key=lambda r: r.realization)]
        n = len(vals)
        mean = math.fsum(vals) / n
        if n > 1:
            var = math.fsum((v - mean) ** 2 for v in vals) / (n - 1)
            stderr = math.sqrt(var / n)
        else:
            stderr = 0.0
        out.append(SummaryRow(abscissa, metric, mean, stderr, n))
    return out


def summary_curve(rows: Sequence[SummaryRow], metric: str) -> tuple[list[float], list[float], list[float]]:
    """Extract one metric's (abscissa, mean, stderr) curve in abscissa order."""
    picked = sorted((r for r in rows if r.metric == metric), key=lambda r: r.abscissa)
    if not picked:
        raise ValueError(f"no summary rows for metric {metric!r}")
    return [r.abscissa for r in picked], [r.mean for r in picked], [r.stderr for r in picked]
