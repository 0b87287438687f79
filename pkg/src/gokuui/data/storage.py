"""Save and load dataset directories."""
import numpy as np

from .._container import read_container, write_container
from ..errors import CorruptDatasetError
from .synthetic import TrajectoryBatch


def save_dataset(path, train, test, manifest):
    """Write ``train``/``test`` (and latents/projection when present) under ``path``."""
    meta = {k: v for k, v in manifest.items() if k != "projection"}
    arrays = {"train": train.data, "test": test.data}
    if train.latents is not None and test.latents is not None:
        arrays["train_latent"] = train.latents
        arrays["test_latent"] = test.latents
    if manifest.get("projection") is not None:
        arrays["projection"] = manifest["projection"]
    shapes = {k: list(np.shape(v)) for k, v in arrays.items()}
    declared = meta.get("shapes")
    if declared is not None:
        for name, shape in shapes.items():
            if name in declared and list(declared[name]) != shape:
                raise CorruptDatasetError(
                    f"array {name} has shape {shape}, manifest declares {declared[name]}"
                )
    meta["shapes"] = shapes
    meta.setdefault("dt_seconds", train.dt_seconds)
    meta["channel_labels"] = list(train.channel_labels)
    return write_container(path, arrays, meta)


def load_dataset(path, verify=True):
    """Return ``(train, test, manifest)``; raises CorruptDatasetError on any mismatch."""
    arrays, manifest = read_container(path, verify=verify)
    shapes = manifest.get("shapes", {})
    for name, arr in arrays.items():
        if name in shapes and list(arr.shape) != list(shapes[name]):
            raise CorruptDatasetError(
                f"{path}: array {name} shape {list(arr.shape)} != manifest shapes entry {shapes[name]}"
            )
    for name in ("train", "test"):
        if name not in arrays:
            raise CorruptDatasetError(f"{path}: missing {name} array")
    gt = manifest.get("ground_truth", {})
    dt = float(manifest.get("dt_seconds", 1.0))
    labels = manifest.get("channel_labels")
    prov = {"path": str(path), "kind": manifest.get("kind")}
    train = TrajectoryBatch(
        arrays["train"], dt, labels, dict(prov, split="train"), arrays.get("train_latent"), gt.get("train")
    )
    test = TrajectoryBatch(
        arrays["test"], dt, labels, dict(prov, split="test"), arrays.get("test_latent"), gt.get("test")
    )
    if "projection" in arrays:
        manifest["projection"] = arrays["projection"].astype(np.float64)
    return train, test, manifest
