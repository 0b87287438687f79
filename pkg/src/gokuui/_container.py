"""Directory container: a JSON manifest plus raw little-endian float32 arrays.

Shared by datasets and checkpoints. Each array is stored in its own file,
row-major, and described in the manifest by shape and SHA-256 digest.
"""
import hashlib
import json
import os
from pathlib import Path

import numpy as np

from .errors import CorruptDatasetError

MANIFEST = "manifest.json"
_DTYPE = np.dtype("<f4")


def _digest(raw):
    return hashlib.sha256(raw).hexdigest()


def write_container(path, arrays, meta):
    """Write ``arrays`` (name -> ndarray) and ``meta`` under directory ``path``."""
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
        records = {}
        for name, arr in arrays.items():
            arr = np.ascontiguousarray(arr, dtype=_DTYPE)
            raw = arr.tobytes(order="C")
            fname = f"{name}.f32"
            with open(path / fname, "wb") as fh:
                fh.write(raw)
            records[name] = {
                "file": fname,
                "shape": list(arr.shape),
                "dtype": "float32-le",
                "sha256": _digest(raw),
            }
        manifest = dict(meta)
        manifest["arrays"] = records
        tmp = path / (MANIFEST + ".tmp")
        with open(tmp, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path / MANIFEST)
    except OSError as exc:
        raise OSError(f"failed writing container at {path}: {exc}") from exc
    return path


def read_manifest(path):
    path = Path(path)
    try:
        with open(path / MANIFEST) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise CorruptDatasetError(f"{path}: missing {MANIFEST}") from exc
    except json.JSONDecodeError as exc:
        raise CorruptDatasetError(f"{path / MANIFEST}: invalid JSON ({exc})") from exc


def read_array(path, manifest, name, verify=True):
    path = Path(path)
    try:
        rec = manifest["arrays"][name]
    except KeyError as exc:
        raise CorruptDatasetError(f"{path}: manifest has no array {name!r}") from exc
    shape = tuple(rec["shape"])
    try:
        raw = (path / rec["file"]).read_bytes()
    except FileNotFoundError as exc:
        raise CorruptDatasetError(f"{path}: missing array file {rec['file']}") from exc
    expected = int(np.prod(shape, dtype=np.int64)) * _DTYPE.itemsize
    if len(raw) != expected:
        raise CorruptDatasetError(
            f"{path / rec['file']}: {len(raw)} bytes on disk, manifest shape {list(shape)} needs {expected}"
        )
    if verify and _digest(raw) != rec["sha256"]:
        raise CorruptDatasetError(f"{path / rec['file']}: checksum mismatch")
    return np.frombuffer(raw, dtype=_DTYPE).reshape(shape).astype(np.float32)


def read_container(path, verify=True):
    manifest = read_manifest(path)
    arrays = {name: read_array(path, manifest, name, verify) for name in manifest.get("arrays", {})}
    return arrays, manifest


def git_blob_hash(data):
    """Content hash in the same form git uses for blobs."""
    header = f"blob {len(data)}\0".encode()
    return hashlib.sha1(header + data).hexdigest()
