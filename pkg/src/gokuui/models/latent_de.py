"""Latent DE model: feature extractor, pattern extractor, latent in/out, DE layer, reconstructor."""
from dataclasses import dataclass

import torch
from torch import nn

from ..errors import DivergenceError, InvalidArgumentError
from ..windows import single_shooting
from .dynamics import LSTMDynamics, NeuralODEDynamics, StuartLandauLayer
from .encoders import AttentionPatternExtractor, BasicPatternExtractor, LatentEncoding
from .layers import MLPHead, ResNetMLP


@dataclass
class ForwardOutput:
    reconstruction: torch.Tensor  # [B, D, T]
    forecast: torch.Tensor  # [B, D, horizon]
    encoding: LatentEncoding = None
    z0: torch.Tensor = None  # [B, K, S], inferred initial state of every window
    theta: torch.Tensor = None  # [B, P]
    window_trajectories: torch.Tensor = None  # [B, K, L, S]
    latent: torch.Tensor = None  # stitched, [B, T, S]


def reparameterize(mean, logvar, generator=None):
    eps = torch.randn(mean.shape, generator=generator, dtype=mean.dtype)
    return mean + torch.exp(0.5 * logvar) * eps


class LatentDEModel(nn.Module):
    STAGES = ("feature_extractor", "pattern_extractor", "latent_in", "latent_out", "de_layer", "reconstructor")

    def __init__(self, spec):
        super().__init__()
        self.spec = spec.validate()
        d = spec.feature_dim
        self.feature_extractor = ResNetMLP(spec.input_dim, d, spec.feature_hidden)
        with_theta = spec.is_goku
        if spec.attention:
            self.pattern_extractor = AttentionPatternExtractor(d, with_theta=with_theta)
        else:
            self.pattern_extractor = BasicPatternExtractor(d, with_theta=with_theta)
        zh = self.pattern_extractor.z_out
        th = self.pattern_extractor.theta_out
        self.latent_in = nn.ModuleDict({"z0_mean": nn.Linear(zh, zh)})
        if with_theta:
            self.latent_in["theta_mean"] = nn.Linear(th, th)
        if spec.variational:
            self.latent_in["z0_logvar"] = nn.Linear(zh, zh)
            if with_theta:
                self.latent_in["theta_logvar"] = nn.Linear(th, th)

        if spec.is_goku:
            self.de_layer = StuartLandauLayer(
                spec.n_oscillators,
                spec.de_param_ranges,
                spec.global_coupling,
                spec.noise_intensity,
                spec.rate_scale,
                spec.time_step,
                spec.substeps,
                spec.stochastic,
                spec.noise_scaling,
            )
        elif spec.variant == "lstm_baseline":
            self.de_layer = LSTMDynamics(spec.z_dim)
        else:
            self.de_layer = NeuralODEDynamics(spec.z_dim, spec.node_hidden_dim, spec.time_step, spec.substeps)
        s = spec.de_state_dim
        # oscillator states live well inside the unit box; an unbounded z0 lets the cubic drift blow up
        z0_act = torch.tanh if spec.is_goku else None
        self.latent_out = nn.ModuleDict({"z0": MLPHead(zh, s, spec.latent_hidden, z0_act)})
        if with_theta:
            self.latent_out["theta"] = MLPHead(th, spec.n_de_params, spec.latent_hidden, torch.sigmoid)
        self.reconstructor = ResNetMLP(s, spec.input_dim, spec.feature_hidden)

    # stages -----------------------------------------------------------------
    def feature_extract(self, batch):
        """``[B, D, T]`` -> ``[B, feature_dim, T]``, each frame processed on its own."""
        if batch.dim() != 3 or batch.shape[1] != self.spec.input_dim:
            raise InvalidArgumentError(
                f"expected input [B, {self.spec.input_dim}, T], got {tuple(batch.shape)}"
            )
        return self.feature_extractor(batch.transpose(1, 2)).transpose(1, 2)

    def pattern_extract(self, features, plan):
        t = features.shape[2]
        if plan.seq_len != t or plan.windows[-1][1] > t:
            raise InvalidArgumentError(f"window plan covers {plan.seq_len} points, input has {t}")
        seq = features.transpose(1, 2)
        h_z0, h_theta, weights = self.pattern_extractor(seq, plan, with_theta=self.spec.is_goku)
        enc = LatentEncoding(self.latent_in["z0_mean"](h_z0), attention_weights=weights)
        if h_theta is not None:
            enc.theta_mean = self.latent_in["theta_mean"](h_theta)
        if self.spec.variational:
            enc.z0_logvar = self.latent_in["z0_logvar"](h_z0)
            if h_theta is not None:
                enc.theta_logvar = self.latent_in["theta_logvar"](h_theta)
        return enc

    def latent_decode(self, encoding, generator=None, sample=None):
        """Map an encoding to DE initial states ``[B, K, S]`` and parameters ``[B, P]``.

        Variational models draw reparameterised samples unless ``sample`` is False.
        """
        sample = self.spec.variational if sample is None else sample
        z = encoding.z0_mean
        th = encoding.theta_mean
        if sample and encoding.z0_logvar is not None:
            z = reparameterize(z, encoding.z0_logvar, generator)
            if th is not None:
                th = reparameterize(th, encoding.theta_logvar, generator)
        z0 = self.latent_out["z0"](z)
        theta = None
        if th is not None:
            theta = self.de_layer.project_theta(self.latent_out["theta"](th))
        return z0, theta

    def reconstruct(self, latent):
        """``[B, T, S]`` -> ``[B, D, T]``"""
        return self.reconstructor(latent).transpose(1, 2)

    # full pass --------------------------------------------------------------
    def forward(self, batch, plan=None, horizon=0, generator=None):
        if plan is None:
            plan = single_shooting(batch.shape[2])
        enc = self.pattern_extract(self.feature_extract(batch), plan)
        z0, theta = self.latent_decode(enc, generator)
        b, k, s = z0.shape
        L = plan.window_len
        theta_w = None
        if theta is not None:
            theta_w = theta.unsqueeze(1).expand(b, k, theta.shape[-1]).reshape(b * k, -1)
        try:
            traj = self.de_layer.evolve(z0.reshape(b * k, s), theta_w, L, generator)
        except DivergenceError as exc:
            sample = None if exc.sample is None else exc.sample // k
            raise DivergenceError(f"DE layer diverged for sample {sample}: {exc}", exc.step, sample) from exc
        traj = traj.reshape(b, k, L, s)
        # the earlier window owns each junction point
        latent = torch.cat([traj[:, 0]] + [traj[:, j, 1:] for j in range(1, k)], dim=1)
        recon = self.reconstruct(latent)
        if horizon > 0:
            ext = self.de_layer.evolve(latent[:, -1], theta, horizon + 1, generator)[:, 1:]
            forecast = self.reconstruct(ext)
        else:
            forecast = recon.new_zeros((b, recon.shape[1], 0))
        return ForwardOutput(recon, forecast, enc, z0, theta, traj, latent)

    # bookkeeping ------------------------------------------------------------
    def stage_parameter_counts(self):
        return {
            name: sum(p.numel() for p in getattr(self, name).parameters()) for name in self.STAGES
        }


class NaivePredictor(nn.Module):
    """Constant prediction: the time average of each channel of the input window."""

    STAGES = ()

    def __init__(self, spec=None):
        super().__init__()
        self.spec = spec

    def forward(self, batch, plan=None, horizon=0, generator=None):
        recon, forecast = naive_predict(batch, horizon)
        return ForwardOutput(recon, forecast)

    def stage_parameter_counts(self):
        return {}


def naive_predict(batch, horizon=0):
    mean = batch.mean(dim=-1, keepdim=True)
    return mean.expand_as(batch).clone(), mean.expand(*batch.shape[:-1], horizon).clone()


def build_model(spec):
    spec.validate()
    if spec.variant == "naive":
        return NaivePredictor(spec)
    return LatentDEModel(spec)
