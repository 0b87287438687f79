"""Fixed-step integrators that double as differentiable layers.

Gradients are obtained by backpropagating through the unrolled steps.
"""
from dataclasses import dataclass
import math

import numpy as np
import torch

from ..errors import DivergenceError, InvalidArgumentError
from ..seeding import derive_seed, torch_generator

SCHEMES = ("euler_maruyama", "rk4_deterministic")


@dataclass(frozen=True)
class SolverConfig:
    scheme: str = "euler_maruyama"
    dt: float = 0.05
    save_every: float = 0.05
    noise_seed: int = 0

    def validate(self):
        if self.scheme not in SCHEMES:
            raise InvalidArgumentError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not self.dt > 0 or not self.save_every > 0:
            raise InvalidArgumentError("dt and save_every must be positive")
        self.save_stride
        return self

    @property
    def save_stride(self):
        ratio = self.save_every / self.dt
        stride = round(ratio)
        if stride < 1 or abs(ratio - stride) > 1e-9 * max(1.0, ratio):
            raise InvalidArgumentError(
                f"save_every={self.save_every} is not an integer multiple of dt={self.dt}"
            )
        return stride


@dataclass
class LatentTrajectory:
    states: torch.Tensor  # [..., time, state]
    times: torch.Tensor
    params: object = None

    def __post_init__(self):
        if self.states.shape[-2] != self.times.shape[0]:
            raise InvalidArgumentError("states and times disagree in length")


def _check_finite(z, step):
    if not bool(torch.isfinite(z).all()):
        sample = None
        if z.dim() > 1:
            bad = (~torch.isfinite(z)).reshape(-1, z.shape[-1]).any(-1).nonzero()
            sample = int(bad[0, 0]) if len(bad) else None
        where = f" (sample {sample})" if sample is not None else ""
        raise DivergenceError(f"non-finite state at step {step}{where}", step=step, sample=sample)


def euler_maruyama(drift, z0, n_steps, dt, diffusion=None, noise=None, save_stride=1, check_finite=True):
    """Unrolled Euler-Maruyama; returns states stacked on axis -2.

    ``noise`` holds standard normal draws of shape ``[n_steps, *z0.shape]``.
    The update is ``z + f(z) dt + g sqrt(dt) xi``.
    """
    if diffusion is not None and noise is None:
        raise InvalidArgumentError("diffusion given without noise draws")
    sq = math.sqrt(dt)
    z = z0
    out = [z0]
    for k in range(n_steps):
        z = z + drift(z) * dt
        if diffusion is not None:
            z = z + diffusion * sq * noise[k]
        if check_finite:
            _check_finite(z, k + 1)
        if (k + 1) % save_stride == 0:
            out.append(z)
    return torch.stack(out, dim=-2)


def rk4(drift, z0, n_steps, dt, save_stride=1, check_finite=True):
    """Classical fourth-order Runge-Kutta, deterministic."""
    z = z0
    out = [z0]
    half = 0.5 * dt
    for k in range(n_steps):
        k1 = drift(z)
        k2 = drift(z + half * k1)
        k3 = drift(z + half * k2)
        k4 = drift(z + dt * k3)
        z = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if check_finite:
            _check_finite(z, k + 1)
        if (k + 1) % save_stride == 0:
            out.append(z)
    return torch.stack(out, dim=-2)


def _n_steps(t_span, dt):
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise InvalidArgumentError(f"empty time span {t_span}")
    ratio = (t1 - t0) / dt
    n = round(ratio)
    if abs(ratio - n) > 1e-9 * max(1.0, ratio):
        raise InvalidArgumentError(f"span {t1 - t0} is not a multiple of dt={dt}")
    return t0, n


def _zero_diffusion(diffusion):
    if diffusion is None:
        return True
    if isinstance(diffusion, torch.Tensor):
        return bool((diffusion == 0).all())
    return float(diffusion) == 0.0


def draw_noise(seed, n_steps, shape, dtype=torch.float64):
    """Standard normal increments for one path, from the stream keyed by ``seed``."""
    return torch.randn((n_steps, *shape), generator=torch_generator(seed), dtype=dtype)


def integrate(drift, diffusion, z0, t_span, config, params=None):
    """Integrate a single path over ``t_span`` and return the saved trajectory.

    ``diffusion`` is a scalar or a vector broadcastable to ``z0`` (additive
    noise), or None. Saved times are ``t0, t0 + save_every, ...``.
    """
    config.validate()
    t0, n = _n_steps(t_span, config.dt)
    stride = config.save_stride
    if config.scheme == "rk4_deterministic":
        if not _zero_diffusion(diffusion):
            raise InvalidArgumentError("rk4_deterministic requires zero diffusion")
        states = rk4(drift, z0, n, config.dt, save_stride=stride)
    else:
        if _zero_diffusion(diffusion):
            states = euler_maruyama(drift, z0, n, config.dt, save_stride=stride)
        else:
            noise = draw_noise(config.noise_seed, n, tuple(z0.shape[-1:]), dtype=z0.dtype)
            states = euler_maruyama(drift, z0, n, config.dt, diffusion, noise, save_stride=stride)
    times = t0 + config.dt * stride * torch.arange(states.shape[-2], dtype=torch.float64)
    return LatentTrajectory(states, times, params)


def sample_seed(base_seed, index):
    """Noise seed of sample ``index`` in a batch integrated with ``base_seed``."""
    return derive_seed(base_seed, "sample-noise", index)


def integrate_batch(drift, diffusion, z0_batch, t_span, config, params=None):
    """Integrate a batch ``[B, S]``; row b uses the noise stream ``sample_seed(seed, b)``.

    Row b equals ``integrate`` called on that row with ``noise_seed=sample_seed(seed, b)``.
    """
    config.validate()
    t0, n = _n_steps(t_span, config.dt)
    stride = config.save_stride
    if z0_batch.dim() != 2:
        raise InvalidArgumentError("z0_batch must have shape [batch, state]")
    if config.scheme == "rk4_deterministic" or _zero_diffusion(diffusion):
        if config.scheme == "rk4_deterministic" and not _zero_diffusion(diffusion):
            raise InvalidArgumentError("rk4_deterministic requires zero diffusion")
        solver = rk4 if config.scheme == "rk4_deterministic" else euler_maruyama
        states = solver(drift, z0_batch, n, config.dt, save_stride=stride)
    else:
        s = z0_batch.shape[-1]
        noise = torch.stack(
            [
                draw_noise(sample_seed(config.noise_seed, b), n, (s,), dtype=z0_batch.dtype)
                for b in range(z0_batch.shape[0])
            ],
            dim=1,
        )
        states = euler_maruyama(drift, z0_batch, n, config.dt, diffusion, noise, save_stride=stride)
    times = t0 + config.dt * stride * torch.arange(states.shape[-2], dtype=torch.float64)
    return LatentTrajectory(states, times, params)
