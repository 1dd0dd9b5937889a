"""Univariate Gaussian kernel density estimation with Scott's-rule bandwidth."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend

SQRT_2PI = math.sqrt(2.0 * math.pi)


def scotts_bandwidth(n: int, d: int = 1) -> float:
    """Scott's rule of thumb, ``n ** (-1 / (d + 4))``.

    Only the sample count and dimensionality enter; the spread of the data does
    not, so the result is in whatever units the samples happen to be in.

    Parameters
    ----------
    n : int
        Number of samples, at least 1.
    d : int
        Dimensionality, at least 1.

    Returns
    -------
    float
    """
    if isinstance(n, bool) or isinstance(d, bool):
        raise TypeError("n and d must be integers")
    if int(n) != n or int(d) != d:
        raise TypeError("n and d must be integers")
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    if d < 1:
        raise ValueError(f"dimensionality must be >= 1, got {d}")
    return float(int(n)) ** (-1.0 / (int(d) + 4))


def _as_finite_1d(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValueError(f"{what} must be finite; entry {bad} is {arr[bad]!r}")
    return arr


@dataclass(frozen=True, eq=False)
class DensityModel:
    """A fitted Gaussian KDE. Immutable; safe to share between threads."""

    samples: np.ndarray
    bandwidth: float

    def __post_init__(self):
        samples = _as_finite_1d(self.samples, "samples").copy()
        if samples.size == 0:
            raise ValueError("a density model needs at least one sample")
        h = float(self.bandwidth)
        if not (math.isfinite(h) and h > 0):
            raise ValueError(f"bandwidth must be positive and finite, got {self.bandwidth!r}")
        if not math.isfinite(1.0 / h):
            raise ValueError(f"bandwidth {h!r} is too small to invert")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "bandwidth", h)

    @property
    def n(self) -> int:
        return int(self.samples.size)

    @property
    def peak_bound(self) -> float:
        """Upper bound on the density, ``1 / (h * sqrt(2 pi))``."""
        return 1.0 / (self.bandwidth * SQRT_2PI)

    def pdf(self, xs) -> np.ndarray:
        return kde_pdf_batch(self, xs)

    def cdf(self, xs) -> np.ndarray:
        return kde_cdf_batch(self, xs)


def fit_kde(samples, bandwidth: float | None = None) -> DensityModel:
    """Fit a Gaussian KDE, using Scott's rule (d = 1) when no bandwidth is given.

    Samples are kept as given, duplicates included. There is no standardization
    step, so the automatic bandwidth is in raw trait units.
    """
    arr = _as_finite_1d(samples, "samples")
    if arr.size == 0:
        raise ValueError("cannot fit a density to an empty sample")
    if bandwidth is None:
        bandwidth = scotts_bandwidth(arr.size, 1)
    elif not (math.isfinite(bandwidth) and bandwidth > 0):
        raise ValueError(f"bandwidth must be positive and finite, got {bandwidth!r}")
    return DensityModel(arr, bandwidth)


def kde_pdf_batch(model: DensityModel, xs) -> np.ndarray:
    """Evaluate the KDE at every point of ``xs``, preserving order.

    The sum runs over all samples with no tail truncation. Terms further than
    about 38 bandwidths away underflow to exactly zero.
    """
    q = _as_finite_1d(xs, "query points")
    if q.size == 0:
        return np.empty(0, dtype=np.float64)
    h = model.bandwidth
    sums = _backend.gauss_kernel_sum(q, model.samples, 1.0 / h)
    return np.asarray(sums) / (model.n * h * SQRT_2PI)


def kde_pdf(model: DensityModel, x: float) -> float:
    """Evaluate the KDE at a single point."""
    return float(kde_pdf_batch(model, [x])[0])


def kde_cdf_batch(model: DensityModel, xs) -> np.ndarray:
    # closed form: average of the Gaussian CDFs centred on each sample
    q = _as_finite_1d(xs, "query points")
    if q.size == 0:
        return np.empty(0, dtype=np.float64)
    sums = _backend.gauss_cdf_sum(q, model.samples, 1.0 / model.bandwidth)
    return np.clip(np.asarray(sums) / model.n, 0.0, 1.0)
