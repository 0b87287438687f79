"""Metric rows, seed aggregation and delimiter-separated report files."""
import csv
from dataclasses import dataclass, field
import math
from pathlib import Path

import numpy as np

from ..errors import InvalidArgumentError

ROW_FIELDS = ("variant", "param", "value", "seed", "task", "nrmse", "n_samples", "data_n_oscillators", "normalization")
AGG_FIELDS = ("variant", "param", "value", "task", "median", "stderr", "n_seeds", "data_n_oscillators")


@dataclass
class MetricsReport:
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    per_sample: dict = field(default_factory=dict)  # (variant, param, value, seed, task) -> array

    def extend(self, other):
        self.rows.extend(other.rows)
        self.per_sample.update(other.per_sample)
        return self


def _key(row, fields):
    return tuple(row.get(f) for f in fields)


def _median(values):
    return float(np.median(values))


def _stderr(values):
    if len(values) < 2:
        return None
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def aggregate(rows):
    """Median and standard error across seeds for every (variant, param, value, task)."""
    if not rows:
        raise InvalidArgumentError("cannot aggregate an empty report")
    groups = {}
    group_fields = ("variant", "param", "value", "task", "data_n_oscillators")
    for row in rows:
        groups.setdefault(_key(row, group_fields), []).append(float(row["nrmse"]))
    out = []
    for key, vals in groups.items():
        g = dict(zip(group_fields, key))
        out.append(
            {
                "variant": g["variant"],
                "param": g["param"],
                "value": g["value"],
                "task": g["task"],
                "median": _median(vals),
                "stderr": _stderr(vals),
                "n_seeds": len(vals),
                "data_n_oscillators": g["data_n_oscillators"],
            }
        )
    return out


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_rows(path, rows, fields):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(fields)
        for row in rows:
            w.writerow([_fmt(row.get(f)) for f in fields])
    return path


def _parse(v):
    if v == "":
        return None
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    return v


def read_rows(path):
    with open(path, newline="") as fh:
        return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def emit_report(report, out_dir):
    """Write ``metrics.csv`` (one row per seed) and ``summary.csv`` (aggregated)."""
    if not report.rows:
        raise InvalidArgumentError("empty report")
    out_dir = Path(out_dir)
    rows_path = write_rows(out_dir / "metrics.csv", report.rows, ROW_FIELDS)
    summary_path = write_rows(out_dir / "summary.csv", aggregate(report.rows), AGG_FIELDS)
    return rows_path, summary_path


def load_report(path):
    """Read a ``metrics.csv`` file (or the directory holding it)."""
    path = Path(path)
    if path.is_dir():
        path = path / "metrics.csv"
    rows = read_rows(path)
    if not rows:
        raise InvalidArgumentError(f"{path}: empty report")
    return MetricsReport(rows, {"source": str(path)})
