"""Latent DE architectures, baselines, sizing and checkpoints."""
from .checkpoint import load_checkpoint, save_checkpoint
from .encoders import LatentEncoding
from .latent_de import ForwardOutput, LatentDEModel, NaivePredictor, build_model, naive_predict
from .layers import AttentionPool, ResNetMLP, attention_pool, mish
from .sizing import count_parameters, match_baseline_size, resolve_spec, spec_parameter_count, stage_shapes
from .spec import VARIANTS, ModelSpec

__all__ = [
    "AttentionPool",
    "ForwardOutput",
    "LatentDEModel",
    "LatentEncoding",
    "ModelSpec",
    "NaivePredictor",
    "ResNetMLP",
    "VARIANTS",
    "attention_pool",
    "build_model",
    "count_parameters",
    "load_checkpoint",
    "match_baseline_size",
    "mish",
    "naive_predict",
    "resolve_spec",
    "save_checkpoint",
    "spec_parameter_count",
    "stage_shapes",
]
