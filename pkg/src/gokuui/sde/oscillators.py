"""Coupled stochastic Stuart-Landau oscillator network.

State layout is ``[x_1..x_N, y_1..y_N]`` with ``z_j = x_j + i y_j``. Per node::

    dx_j = s * ([a_j - x_j^2 - y_j^2] x_j - w_j y_j + G sum_i C_ij (x_i - x_j)) dt + g dW
    dy_j = s * ([a_j - x_j^2 - y_j^2] y_j + w_j x_j + G sum_i C_ij (y_i - y_j)) dt + g dW'

where ``s`` is the time-rescale factor (``rate_scale``) and ``g`` is
``sqrt(s) * beta`` (a time change of the SDE, ``noise_scaling="sqrt"``) or
``s * beta`` (``"linear"``). Every x and y variable gets its own Wiener
increment.
"""
from dataclasses import dataclass
import math

import numpy as np
import torch

from ..errors import InvalidArgumentError


def _as_tensor(v, like=None):
    if isinstance(v, torch.Tensor):
        return v
    dtype = like.dtype if isinstance(like, torch.Tensor) else torch.float64
    return torch.as_tensor(np.asarray(v), dtype=dtype)


NOISE_SCALINGS = ("sqrt", "linear")


def diffusion_scale(noise_intensity, rate_scale, noise_scaling="sqrt"):
    """Noise amplitude after rescaling time by ``rate_scale``."""
    if noise_scaling == "sqrt":
        return math.sqrt(rate_scale) * noise_intensity
    if noise_scaling == "linear":
        return rate_scale * noise_intensity
    raise InvalidArgumentError(f"noise_scaling must be one of {NOISE_SCALINGS}, got {noise_scaling!r}")


@dataclass(frozen=True)
class OscillatorNetworkParams:
    """Parameters of an N-node network.

    ``growth``, ``frequency`` have trailing dimension N and ``coupling`` has
    trailing shape (N, N); leading batch dimensions are allowed and must
    broadcast against the state. ``coupling[i, j]`` weights the influence of
    node i on node j.
    """

    growth: object
    frequency: object
    coupling: object
    global_coupling: float = 0.1
    noise_intensity: float = 0.02
    rate_scale: float = 20.0
    noise_scaling: str = "sqrt"

    @property
    def n_oscillators(self):
        return int(np.shape(self.growth)[-1])

    def validate(self):
        n = self.n_oscillators
        if n < 1:
            raise InvalidArgumentError("n_oscillators must be >= 1")
        if np.shape(self.frequency)[-1] != n:
            raise InvalidArgumentError(
                f"frequency has trailing size {np.shape(self.frequency)[-1]}, expected {n}"
            )
        if tuple(np.shape(self.coupling)[-2:]) != (n, n):
            raise InvalidArgumentError(
                f"coupling has trailing shape {tuple(np.shape(self.coupling)[-2:])}, expected ({n}, {n})"
            )
        if self.noise_intensity < 0:
            raise InvalidArgumentError("noise_intensity must be >= 0")
        if not self.rate_scale > 0:
            raise InvalidArgumentError("rate_scale must be > 0")
        if self.noise_scaling not in NOISE_SCALINGS:
            raise InvalidArgumentError(f"noise_scaling must be one of {NOISE_SCALINGS}")
        for name in ("growth", "frequency", "coupling"):
            v = getattr(self, name)
            finite = torch.isfinite(v).all() if isinstance(v, torch.Tensor) else np.isfinite(v).all()
            if not bool(finite):
                raise InvalidArgumentError(f"{name} has non-finite entries")
        for name in ("global_coupling", "noise_intensity", "rate_scale"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"{name} is not finite")
        return self

    def as_tensors(self, like=None):
        return (
            _as_tensor(self.growth, like),
            _as_tensor(self.frequency, like),
            _as_tensor(self.coupling, like),
        )

    @property
    def n_free(self):
        """Number of inferred parameters (a, w and the full C)."""
        n = self.n_oscillators
        return 2 * n + n * n


def n_sl_params(n_oscillators):
    return 2 * n_oscillators + n_oscillators**2


def split_theta(theta, n_oscillators):
    """Unpack a flat parameter vector ``[a (N), w (N), C (N*N row-major)]``."""
    n = n_oscillators
    if theta.shape[-1] != n_sl_params(n):
        raise InvalidArgumentError(
            f"theta has {theta.shape[-1]} entries, expected {n_sl_params(n)} for N={n}"
        )
    a = theta[..., :n]
    w = theta[..., n : 2 * n]
    c = theta[..., 2 * n :].reshape(*theta.shape[:-1], n, n)
    return a, w, c


def sl_drift(state, params):
    """Drift of the network, differentiable in ``state`` and in tensor params."""
    n = params.n_oscillators
    if state.shape[-1] != 2 * n:
        raise InvalidArgumentError(
            f"state has trailing size {state.shape[-1]}, expected {2 * n} for N={n}"
        )
    a, w, c = params.as_tensors(like=state)
    return _drift(state, a, w, c, params.global_coupling, params.rate_scale)


def _drift(state, a, w, c, g, rate):
    n = a.shape[-1]
    x = state[..., :n]
    y = state[..., n:]
    radial = a - (x * x + y * y)
    # elementwise (C_ij * (x_i - x_j)) so diag(C) multiplies an exact zero
    cx = (c * (x.unsqueeze(-1) - x.unsqueeze(-2))).sum(-2)
    cy = (c * (y.unsqueeze(-1) - y.unsqueeze(-2))).sum(-2)
    dx = radial * x - w * y + g * cx
    dy = radial * y + w * x + g * cy
    return rate * torch.cat([dx, dy], dim=-1)


def sl_diffusion(params, dtype=torch.float64):
    """Additive diagonal noise amplitude, the same for every variable (see ``diffusion_scale``)."""
    n = params.n_oscillators
    g = diffusion_scale(params.noise_intensity, params.rate_scale, params.noise_scaling)
    return torch.full((2 * n,), g, dtype=dtype)


def network_drift_fn(a, w, c, global_coupling, rate_scale):
    """Closure over batched tensor parameters, for use with the solvers."""

    def f(z):
        return _drift(z, a, w, c, global_coupling, rate_scale)

    return f
