"""Pick the kernel implementation once, at import time.

Set ``CWBAL_PURE_PYTHON=1`` to force the NumPy fallback even when the compiled
extension is importable.
"""
import os

import numpy as np

from . import _kernels_py

# compiled kernels are built with finite-math; |u| must stay well inside range
_MAX_SCALED = 1e150

BACKEND = "python"
gauss_kernel_sum = _kernels_py.gauss_kernel_sum
gauss_cdf_sum = _kernels_py.gauss_cdf_sum


def _guarded(fast, slow):
    def call(queries, samples, inv_h):
        queries = np.ascontiguousarray(queries, dtype=np.float64)
        samples = np.ascontiguousarray(samples, dtype=np.float64)
        if queries.size == 0 or samples.size == 0:
            return fast(queries, samples, inv_h)
        with np.errstate(over="ignore"):
            reach = (np.max(np.abs(queries)) + np.max(np.abs(samples))) * inv_h
        if not reach < _MAX_SCALED:
            return slow(queries, samples, inv_h)
        return fast(queries, samples, inv_h)
    call.__name__ = fast.__name__
    call.__doc__ = fast.__doc__
    return call


if not os.environ.get("CWBAL_PURE_PYTHON"):
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        BACKEND = "compiled"
        gauss_kernel_sum = _guarded(_kernels.gauss_kernel_sum, _kernels_py.gauss_kernel_sum)
        gauss_cdf_sum = _guarded(_kernels.gauss_cdf_sum, _kernels_py.gauss_cdf_sum)
