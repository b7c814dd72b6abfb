# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: frequency-response grids and renormalized
power iteration.  Mirrors ilcmap._kernels_py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, log

cnp.import_array()

cdef double _TINY = np.finfo(np.float64).tiny


def t_grid(double a, double b, double v, cnp.int64_t[::1] shifts,
           double[::1] coeffs, double[::1] thetas):
    cdef Py_ssize_t nt = thetas.shape[0]
    cdef Py_ssize_t ns = shifts.shape[0]
    out = np.empty(nt, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t i, k, p
    cdef double complex w, l_val, term
    cdef long s
    for i in range(nt):
        w = cos(thetas[i]) + 1j * sin(thetas[i])
        l_val = 0
        for k in range(ns):
            s = shifts[k]
            term = 1
            if s >= 0:
                for p in range(s):
                    term = term * w
            else:
                for p in range(-s):
                    term = term / w
            l_val = l_val + coeffs[k] * term
        o[i] = 1.0 - v * l_val * w * a / (w - b)
    return out


def iterate_lognorms(object m_in, object x0, int j_max):
    m_arr = np.ascontiguousarray(m_in, dtype=np.float64)
    x_arr = np.array(x0, dtype=np.float64, copy=True)
    if x_arr.ndim == 1:
        x_arr = x_arr[:, None]
    x_arr = np.ascontiguousarray(x_arr)

    cdef double[:, ::1] m = m_arr
    cdef double[:, ::1] x = x_arr
    cdef Py_ssize_t n = x.shape[0], s = x.shape[1]
    if m.shape[0] != n or m.shape[1] != n:
        raise ValueError("matrix/seed shape mismatch")

    out_arr = np.empty((j_max + 1, s), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    y_arr = np.empty((n, s), dtype=np.float64)
    cdef double[:, ::1] y = y_arr

    cdef double[::1] norms = np.empty(s, dtype=np.float64)
    cdef Py_ssize_t i, k, c, j
    cdef double acc, mik

    for c in range(s):
        acc = 0.0
        for i in range(n):
            acc += x[i, c] * x[i, c]
        if acc == 0.0:
            raise ValueError("initial vectors must be nonzero")
        norms[c] = sqrt(acc)
        out[0, c] = log(norms[c])
    for c in range(s):
        for i in range(n):
            x[i, c] /= norms[c]

    for j in range(j_max):
        for i in range(n):
            for c in range(s):
                y[i, c] = 0.0
            for k in range(n):
                mik = m[i, k]
                for c in range(s):
                    y[i, c] += mik * x[k, c]
        for c in range(s):
            acc = 0.0
            for i in range(n):
                acc += y[i, c] * y[i, c]
            norms[c] = sqrt(acc)
            if norms[c] < _TINY:
                norms[c] = _TINY
            out[j + 1, c] = out[j, c] + log(norms[c])
        for i in range(n):
            for c in range(s):
                x[i, c] = y[i, c] / norms[c]
    return out_arr
