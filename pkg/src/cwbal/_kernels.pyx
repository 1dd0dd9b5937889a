# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Gaussian kernel sums.

Each query point is reduced sequentially over the samples, so results do not
depend on the number of OpenMP threads.
"""
import numpy as np

from cython.parallel import prange
from libc.math cimport exp, erfc

cdef double INV_SQRT2 = 0.70710678118654752440


def gauss_kernel_sum(const double[::1] queries, const double[::1] samples,
                     double inv_h):
    """Return ``sum_j exp(-0.5 * ((q - s_j) * inv_h) ** 2)`` for every query."""
    cdef Py_ssize_t m = queries.shape[0]
    cdef Py_ssize_t n = samples.shape[0]
    cdef Py_ssize_t i, j
    cdef double q, u, acc
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    for i in prange(m, nogil=True, schedule="static"):
        q = queries[i]
        acc = 0.0
        for j in range(n):
            u = (q - samples[j]) * inv_h
            acc = acc + exp(-0.5 * u * u)
        res[i] = acc
    return out


def gauss_cdf_sum(const double[::1] queries, const double[::1] samples,
                  double inv_h):
    """Return ``sum_j Phi((q - s_j) * inv_h)`` for every query."""
    cdef Py_ssize_t m = queries.shape[0]
    cdef Py_ssize_t n = samples.shape[0]
    cdef Py_ssize_t i, j
    cdef double q, u, acc
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    for i in prange(m, nogil=True, schedule="static"):
        q = queries[i]
        acc = 0.0
        for j in range(n):
            u = (q - samples[j]) * inv_h
            acc = acc + 0.5 * erfc(-u * INV_SQRT2)
        res[i] = acc
    return out
