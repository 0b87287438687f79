"""Ingest external multichannel series from CSV (one file per sample)."""
import csv
from pathlib import Path

import numpy as np

from ..errors import DegenerateInputError, InvalidArgumentError, ParseError
from .synthetic import TrajectoryBatch


def read_csv_matrix(path):
    """Parse a header + numeric body CSV into ``([time, channel] array, labels)``."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file", row=1) from None
        header = [h.strip() for h in header]
        rows = []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: row {row_no} has {len(row)} cells, header has {len(header)}",
                    row=row_no,
                )
            values = []
            for col_no, cell in enumerate(row, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {row_no}, column {col_no}: non-numeric cell {cell!r}",
                        row=row_no,
                        column=col_no,
                    ) from None
                if not np.isfinite(v):
                    raise ParseError(
                        f"{path}: row {row_no}, column {col_no}: non-finite value", row=row_no, column=col_no
                    )
                values.append(v)
            rows.append(values)
    if not rows:
        raise ParseError(f"{path}: no data rows", row=2)
    return np.asarray(rows, dtype=np.float64), header


def _split_index(split, n_time):
    if isinstance(split, float) and not split.is_integer():
        if not 0 < split < 1:
            raise InvalidArgumentError(f"train fraction {split} must lie in (0, 1)")
        idx = int(round(split * n_time))
    else:
        idx = int(split)
    if not 0 < idx < n_time:
        raise InvalidArgumentError(f"split index {idx} must lie in (0, {n_time})")
    return idx


def ingest_csv(path, dt_seconds, split, per_channel=False):
    """Load CSV file(s), split each series in time, normalise by training std.

    ``path`` is a CSV file or a directory of CSV files with identical headers
    and lengths. ``split`` is either a time index (int) or a training fraction
    in (0, 1). Both splits are divided by the standard deviation of the
    training split: one global scalar by default, per channel if
    ``per_channel``.
    """
    path = Path(path)
    files = sorted(path.glob("*.csv")) if path.is_dir() else [path]
    if not files:
        raise InvalidArgumentError(f"{path}: no CSV files found")
    mats, labels = [], None
    for f in files:
        m, h = read_csv_matrix(f)
        if labels is None:
            labels = h
        elif h != labels:
            raise ParseError(f"{f}: header differs from {files[0].name}", row=1)
        if mats and m.shape != mats[0].shape:
            raise ParseError(f"{f}: shape {m.shape} differs from {mats[0].shape}")
        mats.append(m)
    data = np.stack(mats).transpose(0, 2, 1)  # [sample, channel, time]
    idx = _split_index(split, data.shape[2])
    train, test = data[:, :, :idx], data[:, :, idx:]
    if per_channel:
        std = train.std(axis=(0, 2), keepdims=True)
        if (std == 0).any():
            raise DegenerateInputError("a channel has zero standard deviation in the training split")
    else:
        std = train.std()
        if std == 0:
            raise DegenerateInputError("training split has zero standard deviation")
    prov = {
        "kind": "csv",
        "files": [str(f) for f in files],
        "split_index": idx,
        "normalization": "per_channel_std" if per_channel else "global_std",
        "std": np.ravel(std).tolist(),
    }
    return (
        TrajectoryBatch(train / std, dt_seconds, list(labels), dict(prov, split="train")),
        TrajectoryBatch(test / std, dt_seconds, list(labels), dict(prov, split="test")),
    )
