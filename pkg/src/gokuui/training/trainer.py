"""Training loop for single- and multiple-shooting regimes."""
from dataclasses import asdict, dataclass, replace
import copy
import json
import logging
from pathlib import Path
import time

import numpy as np
import torch

from ..errors import DivergenceError, InvalidArgumentError, NonFiniteLossError
from ..models.checkpoint import save_checkpoint
from ..models.latent_de import NaivePredictor, build_model
from ..seeding import derive_seed, numpy_rng, torch_generator
from .losses import continuity_penalty, kl_term, reconstruction_loss
from .schedule import TrainState, lr_schedule
from ..windows import plan_windows

log = logging.getLogger(__name__)

_DTYPES = {"float32": torch.float32, "float64": torch.float64}


@dataclass
class TrainConfig:
    batch_size: int = 64
    seq_len: int = 46
    window_len: int = 10
    continuity_coeff: float = 2.0
    continuity_warmup_epochs: int = 50  # penalty off before this epoch
    continuity_ramp_epochs: int = 50  # then rises linearly to full strength over this many epochs
    weight_decay: float = 1e-10
    lr_floor: float = 1e-7
    lr_peak: float = 0.005251
    warmup_epochs: int = 20
    plateau_patience: int = 50
    sinusoid_period: int = 50
    amplitude_decay: float = 0.5
    max_epochs: int = 500
    early_stop_patience: int = None
    validation_fraction: float = 0.1
    kl_weight: float = 1.0
    train_size: int = None  # use only the first train_size samples
    dtype: str = "float32"
    seed: int = 0

    def validate(self):
        if self.continuity_coeff < 0:
            raise InvalidArgumentError("continuity_coeff must be >= 0")
        if self.continuity_warmup_epochs < 0 or self.continuity_ramp_epochs < 1:
            raise InvalidArgumentError("continuity_warmup_epochs must be >= 0 and continuity_ramp_epochs >= 1")
        if not self.lr_floor < self.lr_peak:
            raise InvalidArgumentError("lr_floor must be below lr_peak")
        if self.plateau_patience < 1 or self.batch_size < 1 or self.max_epochs < 0:
            raise InvalidArgumentError("plateau_patience and batch_size must be >= 1, max_epochs >= 0")
        if not 0 <= self.validation_fraction < 1:
            raise InvalidArgumentError("validation_fraction must lie in [0, 1)")
        if self.dtype not in _DTYPES:
            raise InvalidArgumentError(f"dtype must be one of {sorted(_DTYPES)}")
        plan_windows(self.seq_len, self.window_len)
        return self

    @property
    def plan(self):
        return plan_windows(self.seq_len, self.window_len)

    @property
    def torch_dtype(self):
        return _DTYPES[self.dtype]

    def lr(self, epoch, state):
        return lr_schedule(
            epoch, state, self.lr_floor, self.lr_peak, self.warmup_epochs, self.sinusoid_period, self.amplitude_decay
        )

    def continuity_at(self, epoch):
        """Continuity coefficient in effect during ``epoch``."""
        if epoch < self.continuity_warmup_epochs:
            return 0.0
        done = (epoch - self.continuity_warmup_epochs + 1) / self.continuity_ramp_epochs
        return self.continuity_coeff * min(1.0, done)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidArgumentError(f"unknown train keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class FitResult:
    model: torch.nn.Module
    state: TrainState
    checkpoint: Path = None
    log_path: Path = None


def init_model(spec, seed, dtype=torch.float32):
    """Build ``spec`` with weights drawn from the ``init`` sub-stream of ``seed``."""
    devices = []
    with torch.random.fork_rng(devices=devices):
        torch.manual_seed(derive_seed(seed, "init"))
        return build_model(spec).to(dtype)


def sample_training_window(sample, seq_len, rng):
    """Uniformly placed contiguous slice of ``seq_len`` points along the last axis."""
    n = sample.shape[-1]
    if n < seq_len:
        raise InvalidArgumentError(f"sample has {n} points, fewer than seq_len={seq_len}")
    start = int(rng.integers(0, n - seq_len + 1))
    return sample[..., start : start + seq_len]


def compute_loss(model, batch, plan, config, generator=None):
    """Loss terms for one batch; ``total`` is the optimised quantity."""
    out = model(batch, plan, 0, generator)
    recon = reconstruction_loss(out.reconstruction, batch)
    zero = recon.new_zeros(())
    penalty = zero
    if out.window_trajectories is not None and config.continuity_coeff > 0:
        penalty = continuity_penalty(out.window_trajectories, out.z0, plan, config.continuity_coeff)
    kl = zero
    enc = out.encoding
    if enc is not None and enc.z0_logvar is not None:
        kl = kl_term(enc.z0_mean, enc.z0_logvar)
        if enc.theta_logvar is not None:
            kl = kl + kl_term(enc.theta_mean, enc.theta_logvar)
        kl = config.kl_weight * kl
    return {"total": recon + penalty + kl, "reconstruction": recon, "continuity": penalty, "kl": kl, "output": out}


def split_train_validation(n_samples, fraction, seed):
    perm = numpy_rng(seed, "validation-split").permutation(n_samples)
    n_val = int(round(fraction * n_samples))
    if fraction > 0 and n_samples > 1:
        n_val = min(max(n_val, 1), n_samples - 1)
    else:
        n_val = 0
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def _theta_stats(out):
    if out is None or out.theta is None:
        return {}
    th = out.theta.detach()
    return {
        "theta_min": float(th.min()),
        "theta_max": float(th.max()),
        "theta_mean": float(th.mean()),
        "theta_nonfinite": int((~torch.isfinite(th)).sum()),
    }


def _fixed_windows(data, seq_len, seed, label):
    rng = numpy_rng(seed, label)
    return np.stack([sample_training_window(s, seq_len, rng) for s in data])


def evaluate_loss(model, windows, plan, config, seed, label="validation-noise"):
    """Mean total loss over fixed windows, with a fixed noise stream."""
    gen = torch_generator(derive_seed(seed, label))
    total, n = 0.0, 0
    with torch.no_grad():
        for s in range(0, len(windows), config.batch_size):
            x = torch.from_numpy(windows[s : s + config.batch_size]).to(config.torch_dtype)
            terms = compute_loss(model, x, plan, config, gen)
            total += float(terms["total"]) * len(x)
            n += len(x)
    return total / max(n, 1)


def fit(model, dataset, config, out_dir=None, on_epoch=None):
    """Train ``model`` on ``dataset`` (a TrajectoryBatch); returns a FitResult.

    The best-validation weights are restored into ``model`` at the end and, if
    ``out_dir`` is given, written there as ``checkpoint/`` alongside a
    line-delimited ``train_log.jsonl``.
    """
    config.validate()
    plan = config.plan
    data = np.asarray(dataset.data, dtype=np.float32)
    if config.train_size is not None:
        if config.train_size > len(data):
            raise InvalidArgumentError(f"train_size {config.train_size} exceeds the {len(data)} available samples")
        data = data[: config.train_size]
    if data.shape[1] != getattr(model.spec, "input_dim", data.shape[1]):
        raise InvalidArgumentError(f"dataset has {data.shape[1]} channels, model expects {model.spec.input_dim}")
    if data.shape[2] < config.seq_len:
        raise InvalidArgumentError(f"samples have {data.shape[2]} points, seq_len is {config.seq_len}")
    state = TrainState()
    out_dir = Path(out_dir) if out_dir is not None else None
    log_path = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        log_path = out_dir / "train_log.jsonl"
        log_path.write_text("")

    if isinstance(model, NaivePredictor) or not any(True for _ in model.parameters()):
        ckpt = None
        return FitResult(model, state, ckpt, log_path)

    train_idx, val_idx = split_train_validation(len(data), config.validation_fraction, config.seed)
    train = data[train_idx]
    val_windows = _fixed_windows(data[val_idx] if len(val_idx) else train, config.seq_len, config.seed, "validation-windows")
    opt = torch.optim.AdamW(model.parameters(), lr=config.lr_floor, weight_decay=config.weight_decay)
    noise_gen = torch_generator(derive_seed(config.seed, "train-noise"))
    best_state = copy.deepcopy(model.state_dict())

    multi = plan.n_windows > 1 and config.continuity_coeff > 0
    for epoch in range(config.max_epochs):
        t0 = time.perf_counter()
        lr = config.lr(epoch, state)
        lam = config.continuity_at(epoch)
        ecfg = replace(config, continuity_coeff=lam)
        if multi and epoch > 0 and lam != config.continuity_at(epoch - 1):
            # losses with and without the penalty are not comparable
            state.reset_best()
            best_state = copy.deepcopy(model.state_dict())
        for group in opt.param_groups:
            group["lr"] = lr
        rng = numpy_rng(config.seed, "batches", epoch)
        order = rng.permutation(len(train))
        model.train()
        sums = {"total": 0.0, "reconstruction": 0.0, "continuity": 0.0, "kl": 0.0}
        for b, s in enumerate(range(0, len(order), config.batch_size)):
            idx = order[s : s + config.batch_size]
            x = np.stack([sample_training_window(train[i], config.seq_len, rng) for i in idx])
            x = torch.from_numpy(x).to(config.torch_dtype)
            try:
                terms = compute_loss(model, x, plan, ecfg, noise_gen)
            except DivergenceError as exc:
                raise NonFiniteLossError(
                    f"epoch {epoch} batch {b}: {exc}", b, {"epoch": epoch, "sample": exc.sample}
                ) from exc
            if not torch.isfinite(terms["total"]):
                diag = {"epoch": epoch, **_theta_stats(terms["output"])}
                raise NonFiniteLossError(f"epoch {epoch} batch {b}: non-finite loss; {diag}", b, diag)
            opt.zero_grad(set_to_none=True)
            terms["total"].backward()
            opt.step()
            for k in sums:
                sums[k] += float(terms[k].detach()) * len(idx)
        model.eval()
        val = evaluate_loss(model, val_windows, plan, ecfg, config.seed)
        improved = state.record_validation(epoch, val, config.warmup_epochs, config.plateau_patience)
        if improved:
            best_state = copy.deepcopy(model.state_dict())
        record = {
            "epoch": epoch,
            "lr": lr,
            "continuity_coeff": lam,
            "train_loss": sums["total"] / len(train),
            "reconstruction": sums["reconstruction"] / len(train),
            "continuity": sums["continuity"] / len(train),
            "kl": sums["kl"] / len(train),
            "val_loss": val,
            "best_val_loss": state.best_val_loss,
            "wall_time": time.perf_counter() - t0,
        }
        state.lr_history.append(lr)
        state.loss_history.append(record["train_loss"])
        if log_path is not None:
            with open(log_path, "a") as fh:
                fh.write(json.dumps(record) + "\n")
        if on_epoch is not None:
            on_epoch(record)
        log.debug("epoch %d lr %.3g train %.4g val %.4g", epoch, lr, record["train_loss"], val)
        if config.early_stop_patience is not None and state.epochs_since_improvement >= config.early_stop_patience:
            break

    model.load_state_dict(best_state)
    ckpt = None
    if out_dir is not None:
        ckpt = save_checkpoint(
            out_dir / "checkpoint",
            model,
            {
                "train_config": config.to_dict(),
                "epochs_run": state.epoch,
                "best_epoch": state.best_epoch,
                "best_val_loss": state.best_val_loss,
                "plateau_epoch": state.plateau_epoch,
            },
        )
    return FitResult(model, state, ckpt, log_path)
