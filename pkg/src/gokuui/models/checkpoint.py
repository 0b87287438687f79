"""Checkpoints in the shared manifest + raw float32 container."""
import torch

from .. import __version__
from .._container import read_container, write_container
from ..errors import CorruptDatasetError
from .latent_de import build_model
from .sizing import stage_shapes
from .spec import ModelSpec


def save_checkpoint(path, model, metadata=None):
    arrays = {name: t.detach().cpu().numpy() for name, t in model.state_dict().items()}
    meta = {
        "kind": "gokuui-checkpoint",
        "created_by": f"gokuui {__version__}",
        "spec": model.spec.to_dict(),
        "stage_shapes": {k: [list(s) for s in v] for k, v in stage_shapes(model.spec).items()},
        "training": metadata or {},
    }
    return write_container(path, arrays, meta)


def load_checkpoint(path, dtype=torch.float32):
    """Rebuild the model stored at ``path``; returns ``(model, manifest)``."""
    arrays, manifest = read_container(path)
    if manifest.get("kind") != "gokuui-checkpoint":
        raise CorruptDatasetError(f"{path}: not a checkpoint")
    model = build_model(ModelSpec.from_dict(manifest["spec"])).to(dtype)
    state = model.state_dict()
    if set(state) != set(arrays):
        raise CorruptDatasetError(
            f"{path}: weight names differ from the architecture ({sorted(set(state) ^ set(arrays))})"
        )
    for name, arr in arrays.items():
        if tuple(arr.shape) != tuple(state[name].shape):
            raise CorruptDatasetError(f"{path}: {name} has shape {arr.shape}, expected {tuple(state[name].shape)}")
    model.load_state_dict({k: torch.from_numpy(v).to(dtype) for k, v in arrays.items()})
    return model, manifest
