"""Experiment sweeps: train and evaluate every (value, seed) cell, resumably."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
import hashlib
import json
import logging
from pathlib import Path
import traceback

from ..config import SWEEP_PARAMS, config_from_dict, dump_config
from ..data.storage import load_dataset, save_dataset
from ..data.synthetic import build_dataset
from ..errors import ConfigError, InvalidArgumentError
from ..models.sizing import resolve_spec
from ..training.trainer import fit, init_model
from .evaluate import evaluate
from .report import ROW_FIELDS, MetricsReport, emit_report, read_rows, write_rows

log = logging.getLogger(__name__)

DONE = "done.json"
FAILED = "failed.json"


def dataset_key(spec):
    raw = json.dumps(spec.to_dict(), sort_keys=True).encode()
    return hashlib.sha1(raw).hexdigest()[:16]


def ensure_dataset(spec, root):
    """Load the dataset for ``spec`` from ``root``, generating and caching it if absent."""
    path = Path(root) / dataset_key(spec)
    if (path / "manifest.json").exists():
        return load_dataset(path) + (path,)
    train, test, manifest = build_dataset(spec)
    save_dataset(path, train, test, manifest)
    return train, test, manifest, path


def apply_value(cfg, param, value, seed):
    """Config of one sweep cell."""
    train = replace(cfg.train, seed=int(seed))
    model = cfg.model
    if param == "train_size":
        train = replace(train, train_size=int(value))
    elif param == "continuity_coeff":
        train = replace(train, continuity_coeff=float(value))
    elif param == "window_len":
        train = replace(train, window_len=int(value))
    elif param == "model_n_oscillators":
        model = replace(model, n_oscillators=int(value))
    elif param is not None:
        raise ConfigError(f"cannot sweep {param!r}; expected one of {SWEEP_PARAMS}")
    return replace(cfg, train=train, model=model)


def cell_dir(out_dir, param, value, seed):
    return Path(out_dir) / "cells" / f"{param}={value}" / f"seed={seed}"


def run_cell(cfg, train, test, directory, param, value, seed):
    """Train and evaluate one cell; writes metrics and a completion marker."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    dump_config(cfg, directory / "config.yaml")
    spec = resolve_spec(replace(cfg.model, input_dim=train.n_channels))
    model = init_model(spec, seed, cfg.train.torch_dtype)
    result = fit(model, train, cfg.train, directory)
    report = evaluate(
        result.model,
        test,
        horizon=cfg.eval.horizon,
        seq_len=cfg.train.seq_len,
        window_len=cfg.train.window_len,
        eval_seed=cfg.eval.eval_seed,
        normalization=cfg.eval.normalization,
        n_draws=cfg.eval.n_draws,
        max_samples=cfg.eval.max_samples,
        variant=spec.variant,
        seed=seed,
        param=param,
        value=value,
        data_n_oscillators=cfg.data.n_oscillators,
    )
    write_rows(directory / "metrics.csv", report.rows, ROW_FIELDS)
    with open(directory / DONE, "w") as fh:
        json.dump({"rows": report.rows, "epochs_run": result.state.epoch, "best_epoch": result.state.best_epoch}, fh)
    return report.rows


def _run_cell_from_disk(cfg_dict, data_path, directory, param, value, seed):
    cfg = config_from_dict(cfg_dict)
    train, test, _ = load_dataset(data_path)
    return run_cell(cfg, train, test, directory, param, value, seed)


def run_sweep(cfg, out_dir, data_path=None, jobs=1):
    """Run ``cfg.sweep`` (values x seeds); returns the MetricsReport.

    Completed cells (with a ``done.json`` marker) are not retrained. A failing
    cell is recorded in ``failed.json`` and the sweep carries on.
    """
    sweep = cfg.sweep
    if (sweep.param is not None and not sweep.values) or not sweep.seeds:
        raise InvalidArgumentError("sweep needs at least one value and one seed")
    param = sweep.param
    values = sweep.values if param is not None else [None]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dump_config(cfg, out_dir / "config.yaml")
    if data_path is None:
        train, test, _, data_path = ensure_dataset(cfg.data, cfg.cache_root() / "datasets")
    else:
        train, test, _ = load_dataset(data_path)
    if param == "train_size" and max(int(v) for v in values) > train.n_samples:
        raise ConfigError(f"train_size up to {max(values)} requested, dataset has {train.n_samples} training samples")

    report = MetricsReport(metadata={"param": param, "values": list(values), "seeds": list(sweep.seeds), "failures": []})
    pending = []
    for value in values:
        for seed in sweep.seeds:
            d = cell_dir(out_dir, param, value, seed)
            if (d / DONE).exists():
                with open(d / DONE) as fh:
                    report.rows.extend(json.load(fh)["rows"])
                continue
            pending.append((apply_value(cfg, param, value, seed), d, value, seed))

    def record_failure(d, value, seed, exc):
        d.mkdir(parents=True, exist_ok=True)
        info = {"value": value, "seed": seed, "error": repr(exc), "traceback": traceback.format_exc()}
        with open(d / FAILED, "w") as fh:
            json.dump(info, fh, indent=2)
        report.metadata["failures"].append({"value": value, "seed": seed, "error": repr(exc)})
        log.warning("sweep cell %s=%s seed %s failed: %r", param, value, seed, exc)

    if jobs > 1 and pending:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                (pool.submit(_run_cell_from_disk, c.to_dict(), str(data_path), str(d), param, v, s), d, v, s)
                for c, d, v, s in pending
            ]
            for fut, d, v, s in futures:
                try:
                    report.rows.extend(fut.result())
                except Exception as exc:  # noqa: BLE001 - cell failures must not stop the sweep
                    record_failure(d, v, s, exc)
    else:
        for c, d, v, s in pending:
            try:
                report.rows.extend(run_cell(c, train, test, d, param, v, s))
            except Exception as exc:  # noqa: BLE001
                record_failure(d, v, s, exc)

    report.rows.sort(key=lambda r: (str(r["value"]), r["seed"] if r["seed"] is not None else -1, r["task"]))
    if report.rows:
        emit_report(report, out_dir)
    return report


def load_sweep_rows(out_dir):
    return read_rows(Path(out_dir) / "metrics.csv")
