"""Command-line entry points.

Exit codes: 0 success, 1 invalid input (config, arguments, files), 2 runtime failure.
"""
import argparse
from dataclasses import replace
import json
import logging
from pathlib import Path
import sys

import yaml

from ._container import git_blob_hash
from .config import CACHE_ENV, SWEEP_PARAMS, dump_config, load_config
from .errors import ConfigError, CorruptDatasetError, InvalidArgumentError, ParseError

log = logging.getLogger("gokuui")

VALIDATION_ERRORS = (ConfigError, InvalidArgumentError, ParseError, CorruptDatasetError, FileNotFoundError)


class _JsonFormatter(logging.Formatter):
    def format(self, record):
        return json.dumps({"level": record.levelname, "logger": record.name, "message": record.getMessage()})


def _hash_inputs(paths):
    out = {}
    for p in paths:
        if p is None:
            continue
        p = Path(p)
        target = p / "manifest.json" if p.is_dir() else p
        if target.exists():
            out[str(p)] = git_blob_hash(target.read_bytes())
    return out


def _echo(out_dir, cfg, inputs):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dump_config(cfg, out_dir / "config.yaml")
    with open(out_dir / "inputs.json", "w") as fh:
        json.dump(_hash_inputs(inputs), fh, indent=2, sort_keys=True)


def _require(path, what):
    if path is not None and not Path(path).exists():
        raise FileNotFoundError(f"{what} not found: {path}")


def cmd_generate_data(args):
    from .data import build_dataset, save_dataset

    cfg = load_config(args.config, args.seed)
    train, test, manifest = build_dataset(cfg.data)
    save_dataset(args.out, train, test, manifest)
    _echo(Path(args.out) / "run", cfg, [args.config])
    log.info("wrote dataset %s (train %s, test %s)", args.out, train.data.shape, test.data.shape)
    return 0


def cmd_train(args):
    from .data import load_dataset
    from .models.sizing import resolve_spec
    from .training import fit, init_model

    _require(args.data, "dataset")
    cfg = load_config(args.config, args.seed)
    train, _, _ = load_dataset(args.data)
    spec = resolve_spec(replace(cfg.model, input_dim=train.n_channels))
    cfg = replace(cfg, model=spec)
    _echo(args.out, cfg, [args.config, args.data])
    model = init_model(spec, cfg.train.seed, cfg.train.torch_dtype)
    result = fit(model, train, cfg.train, args.out)
    log.info("trained %d epochs, best validation loss %.6g", result.state.epoch, result.state.best_val_loss)
    if result.checkpoint is None:
        from .models import save_checkpoint

        save_checkpoint(Path(args.out) / "checkpoint", model, {"train_config": cfg.train.to_dict(), "epochs_run": 0})
    return 0


def cmd_evaluate(args):
    from .data import load_dataset
    from .evaluation import emit_report, evaluate
    from .models import load_checkpoint

    _require(args.checkpoint, "checkpoint")
    _require(args.data, "dataset")
    cfg = load_config(args.config, args.seed)
    model, manifest = load_checkpoint(args.checkpoint)
    tc = manifest.get("training", {}).get("train_config", {})
    _, test, data_manifest = load_dataset(args.data)
    horizon = cfg.eval.horizon if args.horizon is None else args.horizon
    report = evaluate(
        model,
        test,
        horizon=horizon,
        seq_len=tc.get("seq_len", cfg.train.seq_len),
        window_len=tc.get("window_len", cfg.train.window_len),
        eval_seed=cfg.eval.eval_seed,
        normalization=cfg.eval.normalization,
        n_draws=cfg.eval.n_draws,
        max_samples=cfg.eval.max_samples,
        seed=tc.get("seed"),
        data_n_oscillators=data_manifest.get("spec", {}).get("n_oscillators"),
    )
    _echo(args.out, cfg, [args.config, args.checkpoint, args.data])
    emit_report(report, args.out)
    return 0


def cmd_sweep(args):
    from .evaluation.sweep import run_sweep

    _require(args.data, "dataset")
    cfg = load_config(args.config, args.seed)
    sweep = cfg.sweep
    if args.param is not None:
        sweep = replace(sweep, param=args.param)
    if args.values is not None:
        sweep = replace(sweep, values=yaml.safe_load("[" + args.values + "]"))
    if args.seeds is not None:
        sweep = replace(sweep, seeds=[int(s) for s in args.seeds.split(",")])
    if sweep.param is not None and sweep.param not in SWEEP_PARAMS:
        raise ConfigError(f"--param must be one of {SWEEP_PARAMS}")
    cfg = replace(cfg, sweep=sweep)
    _echo(args.out, cfg, [args.config, args.data])
    report = run_sweep(cfg, args.out, data_path=args.data, jobs=args.jobs)
    if report.metadata.get("failures"):
        log.warning("%d sweep cells failed", len(report.metadata["failures"]))
        return 2
    return 0


def cmd_plot(args):
    from .evaluation import emit_plots, load_report

    _require(args.report, "report")
    paths = emit_plots(load_report(args.report), args.out)
    for p in paths:
        log.info("wrote %s", p)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="gokuui", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate-data", help="simulate and save the synthetic benchmark")
    g.add_argument("--config")
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int)
    g.set_defaults(func=cmd_generate_data)

    t = sub.add_parser("train", help="train one model on a dataset directory")
    t.add_argument("--config")
    t.add_argument("--data", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--seed", type=int)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="reconstruction/forecast NRMSE of a checkpoint")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--horizon", type=int)
    e.add_argument("--out", required=True)
    e.add_argument("--config")
    e.add_argument("--seed", type=int)
    e.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("sweep", help="train/evaluate a grid of values x seeds")
    s.add_argument("--config")
    s.add_argument("--param", choices=SWEEP_PARAMS)
    s.add_argument("--values", help="comma-separated values")
    s.add_argument("--seeds", help="comma-separated seeds")
    s.add_argument("--out", required=True)
    s.add_argument("--data", help=f"dataset directory (default: generated under ${CACHE_ENV})")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_sweep)

    pl = sub.add_parser("plot", help="figures from a metrics report")
    pl.add_argument("--report", required=True)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_JsonFormatter())
    log.handlers[:] = [handler]
    log.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    try:
        return args.func(args)
    except VALIDATION_ERRORS as exc:
        print(f"gokuui {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - any other failure is a runtime error
        print(f"gokuui {args.command}: failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
