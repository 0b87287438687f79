# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Euler-Maruyama path for the Stuart-Landau network (data generation).

Operation order mirrors ``_slkernel_py.sl_em_path`` so both backends agree bit
for bit.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, isfinite

cnp.import_array()


def sl_em_path(double[::1] z0, double[::1] a, double[::1] w, double[:, ::1] c,
               double g, double rate, double sigma, double[:, ::1] noise,
               double dt, Py_ssize_t stride):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t n_steps = noise.shape[0]
    cdef Py_ssize_t n_save = n_steps // stride
    cdef Py_ssize_t k, i, j, s = 0
    cdef double sq = sigma * sqrt(dt)
    cdef double radial, cx, cy, dx, dy, xj, yj
    out_arr = np.empty((n_save, 2 * n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] z = np.array(z0, dtype=np.float64)
    cdef double[::1] znew = np.empty(2 * n, dtype=np.float64)

    for k in range(n_steps):
        for j in range(n):
            xj = z[j]
            yj = z[n + j]
            radial = a[j] - (xj * xj + yj * yj)
            cx = c[0, j] * (z[0] - xj)
            cy = c[0, j] * (z[n] - yj)
            for i in range(1, n):
                cx = cx + c[i, j] * (z[i] - xj)
                cy = cy + c[i, j] * (z[n + i] - yj)
            dx = radial * xj - w[j] * yj + g * cx
            dy = radial * yj + w[j] * xj + g * cy
            znew[j] = (xj + (rate * dx) * dt) + sq * noise[k, j]
            znew[n + j] = (yj + (rate * dy) * dt) + sq * noise[k, n + j]
        for j in range(2 * n):
            if not isfinite(znew[j]):
                raise FloatingPointError(f"non-finite state at step {k + 1}")
            z[j] = znew[j]
        if (k + 1) % stride == 0:
            out[s, :] = z
            s += 1
    return out_arr
