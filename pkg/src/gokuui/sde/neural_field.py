"""Fully connected vector field for the Latent-ODE baseline."""
import torch
from torch import nn

from ..errors import InvalidArgumentError


def neural_vector_field(weights, state, activation=torch.tanh):
    """Evaluate a dense stack ``[(W, b), ...]`` at ``state``.

    ``W`` has shape (out, in). ``activation`` follows every layer but the last.
    """
    h = state
    for k, (w, b) in enumerate(weights):
        if w.shape[-1] != h.shape[-1] or b.shape[-1] != w.shape[0]:
            raise InvalidArgumentError(
                f"layer {k}: weight {tuple(w.shape)} / bias {tuple(b.shape)} incompatible with input size {h.shape[-1]}"
            )
        h = h @ w.T + b
        if k < len(weights) - 1:
            h = activation(h)
    if h.shape[-1] != state.shape[-1]:
        raise InvalidArgumentError(f"field maps {state.shape[-1]} -> {h.shape[-1]}, must be square")
    return h


class NeuralVectorField(nn.Module):
    """Three dense layers ``z -> h -> h -> z`` with tanh between them."""

    def __init__(self, z_dim, hidden_dim, n_layers=3):
        super().__init__()
        dims = [z_dim] + [hidden_dim] * (n_layers - 1) + [z_dim]
        self.layers = nn.ModuleList(nn.Linear(i, o) for i, o in zip(dims[:-1], dims[1:]))

    def weights(self):
        return [(l.weight, l.bias) for l in self.layers]

    def forward(self, z):
        return neural_vector_field(self.weights(), z)
