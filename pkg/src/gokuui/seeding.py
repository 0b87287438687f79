"""Labelled sub-streams derived from a single master seed."""
import zlib

import numpy as np
import torch


def _label_key(label):
    return zlib.crc32(label.encode("utf-8"))


def derive_seed(master_seed, label, *keys):
    """Return a 63-bit integer seed for the stream ``(master_seed, label, *keys)``.

    Independent of call order, so the same sub-experiment can be reproduced in
    isolation.
    """
    entropy = [int(master_seed) & 0xFFFFFFFFFFFFFFFF, _label_key(label), *(int(k) for k in keys)]
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1])) & 0x7FFFFFFFFFFFFFFF


def numpy_rng(master_seed, label, *keys):
    return np.random.default_rng(derive_seed(master_seed, label, *keys))


def torch_generator(seed):
    g = torch.Generator()
    g.manual_seed(int(seed))
    return g
