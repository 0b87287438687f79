"""Numpy fallback for the compiled Stuart-Landau Euler-Maruyama path."""
import math

import numpy as np


def sl_em_path(z0, a, w, c, g, rate, sigma, noise, dt, stride):
    z0 = np.asarray(z0, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    n = a.shape[0]
    n_steps = noise.shape[0]
    sq = sigma * math.sqrt(dt)
    out = np.empty((n_steps // stride, 2 * n))
    x = z0[:n].copy()
    y = z0[n:].copy()
    s = 0
    for k in range(n_steps):
        radial = a - (x * x + y * y)
        # sum over axis 0 accumulates rows in order, like the compiled loop
        cx = (c * (x[:, None] - x[None, :])).sum(axis=0)
        cy = (c * (y[:, None] - y[None, :])).sum(axis=0)
        dx = radial * x - w * y + g * cx
        dy = radial * y + w * x + g * cy
        x = (x + (rate * dx) * dt) + sq * noise[k, :n]
        y = (y + (rate * dy) * dt) + sq * noise[k, n:]
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise FloatingPointError(f"non-finite state at step {k + 1}")
        if (k + 1) % stride == 0:
            out[s, :n] = x
            out[s, n:] = y
            s += 1
    return out
