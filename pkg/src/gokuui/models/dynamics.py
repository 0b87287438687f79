"""Differential-equation layers: integrate latent initial states forward in time."""
import torch
from torch import nn

from ..sde.neural_field import NeuralVectorField
from ..sde.oscillators import diffusion_scale, n_sl_params, network_drift_fn, split_theta
from ..sde.solvers import euler_maruyama, rk4


class StuartLandauLayer(nn.Module):
    """Stochastic oscillator network whose (a, w, C) come from the parameter path.

    ``evolve`` integrates with Euler-Maruyama; ``n_points`` saved states are
    spaced ``time_step`` apart, each split into ``substeps`` solver steps.
    """

    def __init__(self, n_oscillators, ranges, global_coupling=0.1, noise_intensity=0.02,
                 rate_scale=20.0, time_step=0.05, substeps=1, stochastic=True, noise_scaling="sqrt"):
        super().__init__()
        self.n_oscillators = n_oscillators
        self.global_coupling = global_coupling
        self.noise_intensity = noise_intensity
        self.rate_scale = rate_scale
        self.noise_scale = diffusion_scale(noise_intensity, rate_scale, noise_scaling)
        self.time_step = time_step
        self.substeps = substeps
        self.stochastic = stochastic and noise_intensity > 0
        n = n_oscillators
        lo = [ranges["growth"][0]] * n + [ranges["frequency"][0]] * n + [ranges["coupling"][0]] * n * n
        hi = [ranges["growth"][1]] * n + [ranges["frequency"][1]] * n + [ranges["coupling"][1]] * n * n
        self.register_buffer("theta_lo", torch.tensor(lo, dtype=torch.float64), persistent=False)
        self.register_buffer("theta_hi", torch.tensor(hi, dtype=torch.float64), persistent=False)

    @property
    def state_dim(self):
        return 2 * self.n_oscillators

    @property
    def n_params(self):
        return n_sl_params(self.n_oscillators)

    def project_theta(self, unit):
        """Map sigmoid outputs in [0, 1] onto the parameter boxes."""
        lo = self.theta_lo.to(unit.dtype)
        hi = self.theta_hi.to(unit.dtype)
        return lo + (hi - lo) * unit

    def evolve(self, z0, theta, n_points, generator=None):
        a, w, c = split_theta(theta, self.n_oscillators)
        drift = network_drift_fn(a, w, c, self.global_coupling, self.rate_scale)
        dt = self.time_step / self.substeps
        n_steps = (n_points - 1) * self.substeps
        if self.stochastic:
            noise = torch.randn((n_steps, *z0.shape), generator=generator, dtype=z0.dtype)
            return euler_maruyama(drift, z0, n_steps, dt, self.noise_scale, noise, save_stride=self.substeps)
        return euler_maruyama(drift, z0, n_steps, dt, save_stride=self.substeps)


class LSTMDynamics(nn.Module):
    """Recurrent stand-in for the DE layer: the last output is fed back as input."""

    def __init__(self, z_dim):
        super().__init__()
        self.cell = nn.LSTMCell(z_dim, z_dim)
        self.state_dim = z_dim

    def evolve(self, z0, theta, n_points, generator=None):
        h = torch.zeros_like(z0)
        c = torch.zeros_like(z0)
        inp = z0
        out = [z0]
        for _ in range(n_points - 1):
            h, c = self.cell(inp, (h, c))
            out.append(h)
            inp = h
        return torch.stack(out, dim=-2)


class NeuralODEDynamics(nn.Module):
    """Latent ODE with a learned vector field, integrated by RK4."""

    def __init__(self, z_dim, hidden_dim, time_step=0.05, substeps=1):
        super().__init__()
        self.field = NeuralVectorField(z_dim, hidden_dim)
        self.state_dim = z_dim
        self.time_step = time_step
        self.substeps = substeps

    def evolve(self, z0, theta, n_points, generator=None):
        dt = self.time_step / self.substeps
        return rk4(self.field, z0, (n_points - 1) * self.substeps, dt, save_stride=self.substeps)

