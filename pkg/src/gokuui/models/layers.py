"""Building blocks shared by every model variant."""
import torch
from torch import nn
import torch.nn.functional as F


def mish(x):
    """x * tanh(softplus(x))"""
    return F.mish(x)


class ResNetMLP(nn.Module):
    """Per-frame residual MLP.

    A dense projection to ``hidden`` (mish), ``n_blocks`` residual blocks
    ``h + mish(W h + b)``, and a linear read-out to ``out_dim``.
    """

    def __init__(self, in_dim, out_dim, hidden=200, n_blocks=3):
        super().__init__()
        self.inp = nn.Linear(in_dim, hidden)
        self.blocks = nn.ModuleList(nn.Linear(hidden, hidden) for _ in range(n_blocks))
        self.out = nn.Linear(hidden, out_dim)

    def forward(self, x):
        h = mish(self.inp(x))
        for block in self.blocks:
            h = h + mish(block(h))
        return self.out(h)


def attention_pool(sequence, scorer):
    """Softmax-over-time weighted sum of ``sequence`` ``[..., T, F]``.

    ``scorer`` maps each frame to logits: shape ``[..., T, F]`` gives one
    weight per time step and feature, ``[..., T, 1]`` one per time step.
    Returns ``(pooled [..., F], weights)``; weights sum to one over time.
    """
    logits = scorer(sequence)
    weights = torch.softmax(logits, dim=-2)
    return (weights * sequence).sum(-2), weights


class AttentionPool(nn.Module):
    def __init__(self, dim):
        super().__init__()
        self.scorer = nn.Linear(dim, dim)

    def forward(self, sequence):
        return attention_pool(sequence, self.scorer)


class MLPHead(nn.Module):
    """Two dense layers ``in -> hidden -> out``; ``activation`` follows both."""

    def __init__(self, in_dim, out_dim, hidden=200, activation=None):
        super().__init__()
        self.hidden = nn.Linear(in_dim, hidden)
        self.out = nn.Linear(hidden, out_dim)
        self.activation = activation

    def forward(self, x):
        act = self.activation or (lambda v: v)
        return act(self.out(act(self.hidden(x))))
