# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled coordinate ascent over Bloch-vector settings.

Same contract as ``_ascent_py``: ``R`` is the 4x4x4 Pauli expectation tensor,
``idx[t, p]`` the setting used by party ``p`` in term ``t`` (-1 = identity).
"""
from libc.math cimport sqrt

import numpy as np


cdef inline void _ext(const double[:, ::1] settings, Py_ssize_t i, double* out) noexcept nogil:
    if i < 0:
        out[0] = 1.0
        out[1] = 0.0
        out[2] = 0.0
        out[3] = 0.0
    else:
        out[0] = 0.0
        out[1] = settings[i, 0]
        out[2] = settings[i, 1]
        out[3] = settings[i, 2]


cdef double _evaluate(const double[:, :, ::1] R, const double[::1] coefs,
                      const long long[:, ::1] idx, const double[:, ::1] settings) noexcept nogil:
    cdef double a[4]
    cdef double b[4]
    cdef double c[4]
    cdef double total = 0.0, acc, ab
    cdef Py_ssize_t t, i, j, k
    for t in range(coefs.shape[0]):
        _ext(settings, idx[t, 0], a)
        _ext(settings, idx[t, 1], b)
        _ext(settings, idx[t, 2], c)
        acc = 0.0
        for i in range(4):
            if a[i] == 0.0:
                continue
            for j in range(4):
                ab = a[i] * b[j]
                if ab == 0.0:
                    continue
                for k in range(4):
                    acc += ab * c[k] * R[i, j, k]
        total += coefs[t] * acc
    return total


cdef void _gradient(const double[:, :, ::1] R, const double[::1] coefs,
                    const long long[:, ::1] idx, const double[:, ::1] settings,
                    Py_ssize_t s, Py_ssize_t p, double* g) noexcept nogil:
    cdef double u[4]
    cdef double v[4]
    cdef double acc, w
    cdef Py_ssize_t t, m, x, y, q1, q2
    g[0] = 0.0
    g[1] = 0.0
    g[2] = 0.0
    if p == 0:
        q1 = 1
        q2 = 2
    elif p == 1:
        q1 = 0
        q2 = 2
    else:
        q1 = 0
        q2 = 1
    for t in range(coefs.shape[0]):
        if idx[t, p] != s:
            continue
        _ext(settings, idx[t, q1], u)
        _ext(settings, idx[t, q2], v)
        for m in range(1, 4):
            acc = 0.0
            for x in range(4):
                if u[x] == 0.0:
                    continue
                for y in range(4):
                    w = u[x] * v[y]
                    if w == 0.0:
                        continue
                    if p == 0:
                        acc += w * R[m, x, y]
                    elif p == 1:
                        acc += w * R[x, m, y]
                    else:
                        acc += w * R[x, y, m]
            g[m - 1] += coefs[t] * acc


def evaluate(R, coefs, idx, settings):
    return _evaluate(R, coefs, idx, settings)


def ascend(double[:, :, ::1] R, double[::1] coefs, long long[:, ::1] idx,
           long long[::1] party, double[:, ::1] settings, int max_sweeps, double tol):
    """Update ``settings`` in place; return (value, sweeps used)."""
    cdef double g[3]
    cdef double norm, new, value
    cdef int sweeps = 0
    cdef Py_ssize_t s
    with nogil:
        value = _evaluate(R, coefs, idx, settings)
        while sweeps < max_sweeps:
            sweeps += 1
            for s in range(settings.shape[0]):
                _gradient(R, coefs, idx, settings, s, party[s], g)
                norm = sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2])
                if norm > 1e-300:
                    settings[s, 0] = g[0] / norm
                    settings[s, 1] = g[1] / norm
                    settings[s, 2] = g[2] / norm
            new = _evaluate(R, coefs, idx, settings)
            if new - value <= tol:
                if new > value:
                    value = new
                break
            value = new
    return value, sweeps
