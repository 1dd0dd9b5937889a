"""NumPy implementation of the kernel sums in ``_kernels.pyx``.

Queries are processed in blocks so memory stays bounded at roughly
``_BLOCK_BYTES`` regardless of problem size.
"""
import numpy as np
from scipy.special import ndtr

_BLOCK_BYTES = 32 * 2**20


def _blocked(queries, samples, inv_h, term):
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    out = np.empty(queries.shape[0], dtype=np.float64)
    step = max(1, _BLOCK_BYTES // (8 * max(1, samples.shape[0])))
    with np.errstate(over="ignore"):
        for start in range(0, queries.shape[0], step):
            u = (queries[start:start + step, None] - samples[None, :]) * inv_h
            out[start:start + step] = term(u).sum(axis=1)
    return out


def gauss_kernel_sum(queries, samples, inv_h):
    """Return ``sum_j exp(-0.5 * ((q - s_j) * inv_h) ** 2)`` for every query."""
    return _blocked(queries, samples, inv_h, lambda u: np.exp(-0.5 * u * u))


def gauss_cdf_sum(queries, samples, inv_h):
    """Return ``sum_j Phi((q - s_j) * inv_h)`` for every query."""
    return _blocked(queries, samples, inv_h, ndtr)
