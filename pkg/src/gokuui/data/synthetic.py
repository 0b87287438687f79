"""Synthetic high-dimensional benchmark built on a stochastic oscillator network.

Each sample draws its own network parameters and initial state, is simulated
in the latent space, trimmed of its initial transient, and mapped to ``D``
channels by one random linear projection shared by the whole dataset.
"""
from dataclasses import asdict, dataclass, field
import math

import numpy as np

from .. import __version__
from ..errors import DivergenceError, InvalidArgumentError
from ..sde import kernel
from ..sde.oscillators import diffusion_scale
from ..seeding import numpy_rng


@dataclass(frozen=True)
class SyntheticDatasetSpec:
    n_oscillators: int = 3
    output_dim: int = 784
    n_train: int = 5000
    n_test: int = 900
    growth_range: tuple = (-0.2, 0.2)
    frequency_range: tuple = (0.08 * math.pi, 0.14 * math.pi)
    coupling_range: tuple = (0.0, 0.2)
    global_coupling: float = 0.1
    noise_intensity: float = 0.02
    rate_scale: float = 20.0
    noise_scaling: str = "sqrt"
    init_range: tuple = (0.3, 0.4)
    total_time: float = 35.0
    dt: float = 0.05  # save interval
    substeps: int = 100  # solver steps per saved point
    trim_steps: int = 100
    projection_range: tuple = (-1.0, 1.0)
    master_seed: int = 0

    def __post_init__(self):
        for name in ("growth_range", "frequency_range", "coupling_range", "init_range", "projection_range"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    def validate(self):
        if self.n_train <= 0 or self.n_test <= 0:
            raise InvalidArgumentError("n_train and n_test must be positive")
        if self.n_oscillators < 1 or self.output_dim < 1 or self.substeps < 1:
            raise InvalidArgumentError("n_oscillators, output_dim and substeps must be >= 1")
        for name in ("growth_range", "frequency_range", "coupling_range", "init_range", "projection_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise InvalidArgumentError(f"{name}: lower bound {lo} exceeds upper bound {hi}")
        if not 0 <= self.trim_steps < self.n_saved:
            raise InvalidArgumentError(
                f"trim_steps={self.trim_steps} must be below the {self.n_saved} saved points"
            )
        if self.noise_intensity < 0 or self.rate_scale <= 0:
            raise InvalidArgumentError("noise_intensity must be >= 0 and rate_scale > 0")
        diffusion_scale(self.noise_intensity, self.rate_scale, self.noise_scaling)
        return self

    @property
    def n_saved(self):
        ratio = self.total_time / self.dt
        n = round(ratio)
        if abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise InvalidArgumentError(f"total_time={self.total_time} is not a multiple of dt={self.dt}")
        return n

    @property
    def n_time(self):
        return self.n_saved - self.trim_steps

    @property
    def state_dim(self):
        return 2 * self.n_oscillators

    def to_dict(self):
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d


@dataclass
class GeneratorSample:
    growth: np.ndarray
    frequency: np.ndarray
    coupling: np.ndarray
    z0: np.ndarray
    rng: np.random.Generator = field(repr=False)

    def record(self):
        return {
            "growth": self.growth.tolist(),
            "frequency": self.frequency.tolist(),
            "coupling": self.coupling.tolist(),
            "z0": self.z0.tolist(),
        }


def sample_generator_params(spec, sample_index):
    """Draw parameters and initial state of sample ``sample_index``.

    The returned generator continues the same per-sample stream and supplies
    the Wiener increments.
    """
    if not 0 <= sample_index < spec.n_train + spec.n_test:
        raise InvalidArgumentError(
            f"sample_index {sample_index} outside [0, {spec.n_train + spec.n_test})"
        )
    rng = numpy_rng(spec.master_seed, "sample", sample_index)
    n = spec.n_oscillators
    a = rng.uniform(*spec.growth_range, size=n)
    w = rng.uniform(*spec.frequency_range, size=n)
    c = rng.uniform(*spec.coupling_range, size=(n, n))
    z0 = rng.uniform(*spec.init_range, size=2 * n)
    return GeneratorSample(a, w, c, z0, rng)


def simulate(spec, sample):
    """Saved latent path ``[n_saved, 2N]`` at t = dt, 2dt, ... (t = 0 excluded)."""
    n_steps = spec.n_saved * spec.substeps
    noise = sample.rng.standard_normal((n_steps, spec.state_dim))
    try:
        return kernel.sl_em_path(
            sample.z0,
            sample.growth,
            sample.frequency,
            np.ascontiguousarray(sample.coupling),
            float(spec.global_coupling),
            float(spec.rate_scale),
            float(diffusion_scale(spec.noise_intensity, spec.rate_scale, spec.noise_scaling)),
            noise,
            spec.dt / spec.substeps,
            spec.substeps,
        )
    except FloatingPointError as exc:
        raise DivergenceError(str(exc)) from exc


def generate_latent(spec, sample_index, sample=None):
    """Latent trajectory of one sample after trimming, shape ``[n_time, 2N]``."""
    if sample is None:
        sample = sample_generator_params(spec, sample_index)
    try:
        path = simulate(spec, sample)
    except DivergenceError as exc:
        raise DivergenceError(f"sample {sample_index}: {exc}", sample=sample_index) from exc
    return path[spec.trim_steps :]


def make_projection(spec, seed):
    """Random ``[D, 2N]`` matrix with i.i.d. uniform entries."""
    rng = numpy_rng(seed, "projection")
    return rng.uniform(*spec.projection_range, size=(spec.output_dim, spec.state_dim))


def project(latents, projection):
    """Map ``[..., T, 2N]`` latents to ``[..., D, T]`` channels, timestep by timestep."""
    return np.einsum("dk,...tk->...dt", projection, latents)


@dataclass
class TrajectoryBatch:
    """Multichannel series ``data[sample, channel, time]``."""

    data: np.ndarray
    dt_seconds: float = 1.0
    channel_labels: list = None
    provenance: dict = field(default_factory=dict)
    latents: np.ndarray = None  # [sample, time, state], synthetic data only
    params: list = None

    def __post_init__(self):
        if self.data.ndim != 3:
            raise InvalidArgumentError(f"data must be [samples, channels, time], got shape {self.data.shape}")
        if self.channel_labels is None:
            self.channel_labels = [f"ch{i}" for i in range(self.data.shape[1])]
        if len(self.channel_labels) != self.data.shape[1]:
            raise InvalidArgumentError("one channel label per channel required")
        if np.isnan(self.data).any():
            raise InvalidArgumentError("data contains NaN")

    @property
    def n_samples(self):
        return self.data.shape[0]

    @property
    def n_channels(self):
        return self.data.shape[1]

    @property
    def n_time(self):
        return self.data.shape[2]

    def subset(self, indices):
        indices = np.asarray(indices)
        return TrajectoryBatch(
            self.data[indices],
            self.dt_seconds,
            list(self.channel_labels),
            dict(self.provenance, subset=len(indices)),
            None if self.latents is None else self.latents[indices],
            None if self.params is None else [self.params[i] for i in indices],
        )


def plan_manifest(spec):
    """Manifest describing the dataset ``spec`` would produce, without simulating it."""
    spec.validate()
    t = spec.n_time
    return {
        "kind": "synthetic-stuart-landau",
        "spec": spec.to_dict(),
        "seeds": {"master_seed": spec.master_seed, "projection_seed": spec.master_seed},
        "shapes": {
            "train": [spec.n_train, spec.output_dim, t],
            "test": [spec.n_test, spec.output_dim, t],
            "train_latent": [spec.n_train, t, spec.state_dim],
            "test_latent": [spec.n_test, t, spec.state_dim],
            "projection": [spec.output_dim, spec.state_dim],
        },
        "storage_dtype": "float32-le",
        "dt_seconds": spec.dt,
        "sample_index_ranges": {
            "train": [0, spec.n_train],
            "test": [spec.n_train, spec.n_train + spec.n_test],
        },
        "created_by": f"gokuui {__version__}",
    }


def build_dataset(spec, projection=None):
    """Simulate every sample and project it; returns ``(train, test, manifest)``."""
    manifest = plan_manifest(spec)
    if projection is None:
        projection = make_projection(spec, spec.master_seed)
    projection = np.asarray(projection, dtype=np.float64)
    if projection.shape != (spec.output_dim, spec.state_dim):
        raise InvalidArgumentError(f"projection must have shape {(spec.output_dim, spec.state_dim)}")

    def split(start, count):
        latents = np.empty((count, spec.n_time, spec.state_dim))
        records = []
        for k in range(count):
            sample = sample_generator_params(spec, start + k)
            latents[k] = generate_latent(spec, start + k, sample)
            records.append(sample.record())
        data = project(latents, projection).astype(np.float32)
        return latents, data, records

    tr_lat, tr_data, tr_rec = split(0, spec.n_train)
    te_lat, te_data, te_rec = split(spec.n_train, spec.n_test)
    manifest["ground_truth"] = {"train": tr_rec, "test": te_rec}
    labels = [f"ch{i}" for i in range(spec.output_dim)]
    prov = {"kind": manifest["kind"], "master_seed": spec.master_seed}
    train = TrajectoryBatch(tr_data, spec.dt, labels, dict(prov, split="train"), tr_lat, tr_rec)
    test = TrajectoryBatch(te_data, spec.dt, list(labels), dict(prov, split="test"), te_lat, te_rec)
    manifest["projection"] = projection
    return train, test, manifest
