"""Parameter counting and baseline size matching.

Counts are computed by walking layer shapes, so the search does not have to
instantiate models.
"""
from dataclasses import replace

import numpy as np

from ..errors import InvalidArgumentError, NoSolutionError
from .spec import ModelSpec

MATCH_TOLERANCE = 0.02


def _linear(i, o):
    return [(o, i), (o,)]


def _recurrent(i, h, layers=1, bidirectional=False, gates=1):
    shapes = []
    dirs = 2 if bidirectional else 1
    for layer in range(layers):
        inp = i if layer == 0 else h * dirs
        for _ in range(dirs):
            shapes += [(gates * h, inp), (gates * h, h), (gates * h,), (gates * h,)]
    return shapes


def _resnet(i, o, hidden, blocks=3):
    shapes = _linear(i, hidden)
    for _ in range(blocks):
        shapes += _linear(hidden, hidden)
    return shapes + _linear(hidden, o)


def stage_shapes(spec):
    """Parameter shapes of every stage of the model ``spec`` describes."""
    if spec.variant == "naive":
        return {}
    d, fh, lh = spec.feature_dim, spec.feature_hidden, spec.latent_hidden
    goku = spec.is_goku
    if spec.attention:
        zh, th = 128, 128
        pattern = _recurrent(d, 128, gates=4)
        if goku:
            pattern += _recurrent(d, 64, bidirectional=True, gates=4) + _linear(th, th)
    else:
        zh, th = 64, 128
        pattern = _recurrent(d, 64, layers=2)
        if goku:
            pattern += _recurrent(d, 64, layers=2, bidirectional=True, gates=4)
    latent_in = _linear(zh, zh) + (_linear(th, th) if goku else [])
    if spec.variational:
        latent_in += _linear(zh, zh) + (_linear(th, th) if goku else [])
    s = spec.de_state_dim
    latent_out = _linear(zh, lh) + _linear(lh, s)
    if goku:
        latent_out += _linear(th, lh) + _linear(lh, spec.n_de_params)
    if spec.variant == "lstm_baseline":
        de = _recurrent(s, s, gates=4)
    elif spec.variant == "latent_ode_baseline":
        h = spec.node_hidden_dim
        de = _linear(s, h) + _linear(h, h) + _linear(h, s)
    else:
        de = []
    return {
        "feature_extractor": _resnet(spec.input_dim, d, fh),
        "pattern_extractor": pattern,
        "latent_in": latent_in,
        "latent_out": latent_out,
        "de_layer": de,
        "reconstructor": _resnet(s, spec.input_dim, fh),
    }


def spec_parameter_count(spec):
    return int(sum(int(np.prod(shape)) for shapes in stage_shapes(spec).values() for shape in shapes))


def count_parameters(model):
    """Total number of trainable scalars in ``model``."""
    return int(sum(p.numel() for p in model.parameters() if p.requires_grad))


def goku_ui_spec(base):
    """The attention GOKU reference that baselines are sized against."""
    return replace(base, variant="goku_attention", z_dim=None, node_hidden_dim=None, variational=False)


def _lstm_count(base, z):
    return spec_parameter_count(replace(base, variant="lstm_baseline", z_dim=int(z)))


def match_baseline_size(target_count, variant, base=None, z_range=(1, 1024), hidden_range=(1, 1024),
                        preferred_hidden=None, tolerance=MATCH_TOLERANCE):
    """Choose baseline latent dims whose total count is closest to ``target_count``.

    LSTM baselines search ``z_dim``; Latent-ODE baselines search the
    ``(z_dim, node_hidden_dim)`` grid, breaking ties towards
    ``preferred_hidden`` (default: the feature width) and then smaller
    ``z_dim``. Raises NoSolutionError if the best mismatch exceeds
    ``tolerance * target_count``.
    """
    if target_count <= 0:
        raise InvalidArgumentError("target_count must be positive")
    base = base or ModelSpec()
    if variant == "lstm_baseline":
        counts = {z: _lstm_count(base, z) for z in range(z_range[0], z_range[1] + 1)}
        z_best = min(counts, key=lambda z: (abs(counts[z] - target_count), z))
        dims = {"z_dim": z_best}
        count = counts[z_best]
    elif variant == "latent_ode_baseline":
        pref = preferred_hidden or base.feature_hidden
        zs = np.arange(z_range[0], z_range[1] + 1)[:, None]
        hs = np.arange(hidden_range[0], hidden_range[1] + 1)[None, :]
        fixed = spec_parameter_count(replace(base, variant="latent_ode_baseline", z_dim=1, node_hidden_dim=1))
        # z- and h-dependent terms of the count, minus their value at z = h = 1
        lh, fh = base.latent_hidden, base.feature_hidden
        def varying(z, h):
            field = z * h + h + h * h + h + h * z + z
            return field + lh * z + z + fh * z
        counts = fixed - varying(1, 1) + varying(zs, hs)
        err = np.abs(counts - target_count)
        z_key = np.broadcast_to(zs, err.shape).ravel()
        h_key = np.broadcast_to(np.abs(hs - pref), err.shape).ravel()
        order = np.lexsort((z_key, h_key, err.ravel()))
        zi, hi = np.unravel_index(order[0], err.shape)
        dims = {"z_dim": int(zs[zi, 0]), "node_hidden_dim": int(hs[0, hi])}
        count = spec_parameter_count(replace(base, variant="latent_ode_baseline", **dims))
    else:
        raise InvalidArgumentError(f"size matching applies to baselines, not {variant!r}")
    if abs(count - target_count) > tolerance * target_count:
        raise NoSolutionError(
            f"closest {variant} has {count} parameters, target {target_count} (> {tolerance:.0%} apart)"
        )
    return dims


def resolve_spec(spec):
    """Fill in baseline dims by matching the GOKU-UI count for the same data, if unset."""
    if spec.variant == "lstm_baseline" and spec.z_dim is None:
        target = spec.baseline_size_target or spec_parameter_count(goku_ui_spec(spec))
        return replace(spec, **match_baseline_size(target, "lstm_baseline", spec))
    if spec.variant == "latent_ode_baseline" and (spec.z_dim is None or spec.node_hidden_dim is None):
        target = spec.baseline_size_target or spec_parameter_count(goku_ui_spec(spec))
        kwargs = {}
        if spec.z_dim is not None:
            kwargs["z_range"] = (spec.z_dim, spec.z_dim)
        if spec.node_hidden_dim is not None:
            kwargs["hidden_range"] = (spec.node_hidden_dim, spec.node_hidden_dim)
        return replace(spec, **match_baseline_size(target, "latent_ode_baseline", spec, **kwargs))
    return spec
