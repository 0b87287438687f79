"""Differentiable dynamics core: oscillator network, neural field, solvers."""
from .neural_field import NeuralVectorField, neural_vector_field
from .oscillators import (
    NOISE_SCALINGS,
    OscillatorNetworkParams,
    diffusion_scale,
    n_sl_params,
    network_drift_fn,
    sl_diffusion,
    sl_drift,
    split_theta,
)
from .solvers import (
    LatentTrajectory,
    SolverConfig,
    draw_noise,
    euler_maruyama,
    integrate,
    integrate_batch,
    rk4,
    sample_seed,
)

__all__ = [
    "NOISE_SCALINGS",
    "LatentTrajectory",
    "NeuralVectorField",
    "OscillatorNetworkParams",
    "SolverConfig",
    "diffusion_scale",
    "draw_noise",
    "euler_maruyama",
    "integrate",
    "integrate_batch",
    "n_sl_params",
    "network_drift_fn",
    "neural_vector_field",
    "rk4",
    "sample_seed",
    "sl_diffusion",
    "sl_drift",
    "split_theta",
]
