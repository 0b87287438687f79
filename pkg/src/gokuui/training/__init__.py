"""Window planning, objectives, learning-rate schedule and the training loop."""
from .losses import continuity_penalty, kl_term, reconstruction_loss
from .schedule import TrainState, lr_schedule
from .trainer import (
    FitResult,
    TrainConfig,
    compute_loss,
    fit,
    init_model,
    sample_training_window,
    split_train_validation,
)
from ..windows import WindowPlan, plan_windows, single_shooting

__all__ = [
    "FitResult",
    "TrainConfig",
    "TrainState",
    "WindowPlan",
    "compute_loss",
    "continuity_penalty",
    "fit",
    "init_model",
    "kl_term",
    "lr_schedule",
    "plan_windows",
    "reconstruction_loss",
    "sample_training_window",
    "single_shooting",
    "split_train_validation",
]
