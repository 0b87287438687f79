"""Training objectives."""
import torch

from ..errors import DegenerateInputError


def reconstruction_loss(pred, target):
    """Mean squared error divided by the mean absolute value of ``target``."""
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {tuple(pred.shape)} vs {tuple(target.shape)}")
    scale = target.abs().mean()
    if float(scale) == 0.0:
        raise DegenerateInputError("target has zero mean absolute value")
    return ((pred - target) ** 2).mean() / scale


def continuity_penalty(window_trajectories, window_z0, plan, coeff):
    """``coeff / J * sum_j ||z_end(j) - z0(j+1)||^2`` over the J junctions, batch-averaged.

    ``window_trajectories`` is ``[B, K, L, S]`` (or ``[K, L, S]``) and
    ``window_z0`` is ``[B, K, S]`` (or ``[K, S]``).
    """
    if window_trajectories.dim() == 3:
        window_trajectories = window_trajectories.unsqueeze(0)
        window_z0 = window_z0.unsqueeze(0)
    j = plan.n_junctions
    if j == 0:
        return window_trajectories.new_zeros(())
    gaps = window_trajectories[:, :-1, -1, :] - window_z0[:, 1:, :]
    return coeff / j * (gaps**2).sum(dim=(1, 2)).mean()


def kl_term(mean, logvar):
    """KL(N(mean, exp(logvar)) || N(0, I)), summed over latent dims, averaged over the batch."""
    kl = 0.5 * (mean**2 + torch.exp(logvar) - 1.0 - logvar)
    if kl.dim() == 1:
        return kl.sum()
    return kl.reshape(kl.shape[0], -1).sum(-1).mean()
