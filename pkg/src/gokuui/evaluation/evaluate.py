"""Reconstruction and forecast evaluation of a trained model on held-out samples."""
import time

import numpy as np
import torch

from ..errors import InvalidArgumentError
from ..models.checkpoint import load_checkpoint
from ..seeding import derive_seed, numpy_rng, torch_generator
from ..windows import plan_windows
from .metrics import nrmse
from .report import MetricsReport


def evaluation_windows(n_time, n_samples, seq_len, horizon, eval_seed):
    """Start index of the input window of every sample (shared across models)."""
    last = n_time - seq_len - horizon
    if last < 0:
        raise InvalidArgumentError(
            f"samples have {n_time} points; seq_len {seq_len} + horizon {horizon} do not fit"
        )
    rng = numpy_rng(eval_seed, "eval-windows")
    return rng.integers(0, last + 1, size=n_samples)


def predict_sample(model, x, plan, horizon, eval_seed, sample_index, n_draws=1):
    """Prediction for one sample ``[D, T]``; noise fixed per (eval seed, sample, draw)."""
    dtype = next(model.parameters(), torch.zeros((), dtype=torch.float32)).dtype
    xt = torch.as_tensor(x, dtype=dtype).unsqueeze(0)
    recon = forecast = 0.0
    with torch.no_grad():
        for d in range(n_draws):
            gen = torch_generator(derive_seed(eval_seed, "eval-noise", sample_index, d))
            out = model(xt, plan, horizon, gen)
            recon = recon + out.reconstruction[0].double().numpy()
            forecast = forecast + out.forecast[0].double().numpy()
    return recon / n_draws, forecast / n_draws


def evaluate(model, test, horizon=20, seq_len=46, window_len=None, eval_seed=0, normalization="mean_abs",
             n_draws=1, max_samples=None, variant=None, seed=None, param=None, value=None,
             data_n_oscillators=None):
    """Per-sample NRMSE on reconstruction (input window) and forecast (next ``horizon`` points).

    ``model`` is a module or a checkpoint directory. Returns a MetricsReport
    with one row per task holding the median over samples; the per-sample
    values are kept in ``report.per_sample``.
    """
    t_start = time.perf_counter()
    if not isinstance(model, torch.nn.Module):
        model, manifest = load_checkpoint(model)
        if window_len is None:
            window_len = manifest.get("training", {}).get("train_config", {}).get("window_len")
    model.eval()
    window_len = window_len or seq_len
    plan = plan_windows(seq_len, window_len)
    data = test.data if hasattr(test, "data") else np.asarray(test)
    if max_samples is not None:
        data = data[:max_samples]
    starts = evaluation_windows(data.shape[2], len(data), seq_len, horizon, eval_seed)
    rec_err, fc_err = [], []
    for i, s in enumerate(starts):
        x = data[i, :, s : s + seq_len]
        future = data[i, :, s + seq_len : s + seq_len + horizon]
        recon, forecast = predict_sample(model, x, plan, horizon, eval_seed, i, n_draws)
        rec_err.append(nrmse(recon, x, normalization))
        if horizon > 0:
            fc_err.append(nrmse(forecast, future, normalization))
    variant = variant or getattr(getattr(model, "spec", None), "variant", "unknown")
    base = {
        "variant": variant,
        "param": param,
        "value": value,
        "seed": seed,
        "n_samples": len(starts),
        "data_n_oscillators": data_n_oscillators,
        "normalization": normalization,
    }
    report = MetricsReport(metadata={"runtime_seconds": None, "horizon": horizon, "eval_seed": eval_seed})
    tasks = [("reconstruction", rec_err)] + ([("forecast", fc_err)] if horizon > 0 else [])
    for task, errs in tasks:
        errs = np.asarray(errs)
        report.rows.append(dict(base, task=task, nrmse=float(np.median(errs))))
        report.per_sample[(variant, param, value, seed, task)] = errs
    report.metadata["runtime_seconds"] = time.perf_counter() - t_start
    return report
