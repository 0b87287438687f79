"""Normalised error metrics."""
import numpy as np
import torch

from ..errors import DegenerateInputError, InvalidArgumentError

NORMALIZATIONS = ("mean_abs", "std")


def _np(a):
    if isinstance(a, torch.Tensor):
        return a.detach().cpu().double().numpy()
    return np.asarray(a, dtype=np.float64)


def nrmse(pred, target, normalization="mean_abs"):
    """Root-mean-square error over all elements divided by a scale of ``target``.

    ``mean_abs`` divides by mean |target| (the training-loss normaliser);
    ``std`` divides by the standard deviation of ``target``.
    """
    p, t = _np(pred), _np(target)
    if p.shape != t.shape:
        raise InvalidArgumentError(f"shape mismatch: {p.shape} vs {t.shape}")
    if normalization == "mean_abs":
        scale = np.abs(t).mean()
    elif normalization == "std":
        scale = t.std()
    else:
        raise InvalidArgumentError(f"normalization must be one of {NORMALIZATIONS}")
    if scale == 0:
        raise DegenerateInputError("target has zero scale")
    return float(np.sqrt(((p - t) ** 2).mean()) / scale)
