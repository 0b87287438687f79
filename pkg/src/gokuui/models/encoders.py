"""Pattern extractors: per-window initial-state path and whole-sequence parameter path."""
from dataclasses import dataclass

import torch
from torch import nn

from .layers import AttentionPool


@dataclass
class LatentEncoding:
    z0_mean: torch.Tensor  # [B, n_windows, z_hidden]
    theta_mean: torch.Tensor = None  # [B, theta_hidden]; one per sample regardless of windows
    z0_logvar: torch.Tensor = None
    theta_logvar: torch.Tensor = None
    attention_weights: torch.Tensor = None  # [B, T, F]

    @property
    def n_windows(self):
        return self.z0_mean.shape[1]


def _window_stack(features, plan):
    # features [B, T, F] -> [B*K, L, F]
    slices = [features[:, s:e] for s, e in plan.windows]
    stacked = torch.stack(slices, dim=1)
    b, k, l, f = stacked.shape
    return stacked.reshape(b * k, l, f), b, k


class _PatternExtractor(nn.Module):
    z_out = None
    theta_out = None

    def initial_states(self, features, plan):
        """Run the initial-state RNN backwards over every window slice.

        Reading each window in reverse makes the final output summarise the
        window as seen from its first time point.
        """
        x, b, k = _window_stack(features, plan)
        out, _ = self.z0_rnn(torch.flip(x, dims=[1]))
        return out[:, -1].reshape(b, k, -1)

    def forward(self, features, plan, with_theta=True):
        z0 = self.initial_states(features, plan)
        if not with_theta:
            return z0, None, None
        theta, weights = self.parameters_path(features)
        return z0, theta, weights


class BasicPatternExtractor(_PatternExtractor):
    """2-layer ReLU RNN (64) for initial states; 2-layer BiLSTM (64 per direction) for parameters."""

    def __init__(self, feature_dim=128, z_hidden=64, theta_hidden=64, with_theta=True):
        super().__init__()
        self.z0_rnn = nn.RNN(feature_dim, z_hidden, num_layers=2, nonlinearity="relu", batch_first=True)
        if with_theta:
            self.theta_rnn = nn.LSTM(feature_dim, theta_hidden, num_layers=2, bidirectional=True, batch_first=True)
        self.z_out = z_hidden
        self.theta_out = 2 * theta_hidden

    def parameters_path(self, features):
        _, (h_n, _) = self.theta_rnn(features)
        # last element of each direction: forward at T-1, backward at 0
        return torch.cat([h_n[-2], h_n[-1]], dim=-1), None


class AttentionPatternExtractor(_PatternExtractor):
    """1-layer LSTM (128) for initial states; BiLSTM + attention pooling for parameters."""

    def __init__(self, feature_dim=128, z_hidden=128, theta_hidden=64, with_theta=True):
        super().__init__()
        self.z0_rnn = nn.LSTM(feature_dim, z_hidden, num_layers=1, batch_first=True)
        if with_theta:
            self.theta_rnn = nn.LSTM(feature_dim, theta_hidden, num_layers=1, bidirectional=True, batch_first=True)
            self.attention = AttentionPool(2 * theta_hidden)
        self.z_out = z_hidden
        self.theta_out = 2 * theta_hidden

    def parameters_path(self, features):
        seq, _ = self.theta_rnn(features)
        return self.attention(seq)
