"""Density-ratio sample weights, the binned baseline, and fidelity diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .density import DensityModel, kde_pdf_batch
from .targets import TargetSpec, target_cdf_batch, target_pdf_batch

SCHEMES = ("continuous", "discrete", "uniform")
HISTOGRAM_COLUMNS = ("bin_left", "bin_right", "unweighted_count",
                     "weighted_mass", "target_pdf_at_center")
DEFAULT_FLOOR = 1e-12
DEFAULT_BINS = 10


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Per-sample weights plus how they were produced.

    ``raw`` holds the weights after flooring and clipping but before the
    mean-one rescaling, so ``weights == raw * scale``.
    """

    weights: np.ndarray
    scheme: str
    normalized: bool = False
    clip_limit: float | None = None
    raw: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1:
            raise ValueError("weights must be one-dimensional")
        if not np.all(np.isfinite(w)):
            raise RuntimeError("non-finite weight produced")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown weighting scheme {self.scheme!r}")
        if self.clip_limit is not None and not self.clip_limit > 0:
            raise ValueError(f"clip limit must be positive, got {self.clip_limit!r}")
        raw = w.copy() if self.raw is None else np.array(self.raw, dtype=np.float64)
        if raw.shape != w.shape:
            raise ValueError("raw weights must match weights in length")
        w.setflags(write=False)
        raw.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "raw", raw)

    def __len__(self):
        return self.weights.size

    @property
    def total(self) -> float:
        return float(self.weights.sum())


def as_weight_array(weights, n: int) -> np.ndarray:
    """Accept a WeightVector, array-like, or None (all ones) of length ``n``."""
    if weights is None:
        return np.ones(n, dtype=np.float64)
    if isinstance(weights, WeightVector):
        arr = weights.weights
    else:
        arr = np.asarray(weights, dtype=np.float64)
    if arr.shape != (n,):
        raise ValueError(f"expected {n} weights, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("weights must be finite and non-negative")
    return arr


def uniform_weights(n: int) -> WeightVector:
    if n < 1:
        raise ValueError("need at least one sample")
    return WeightVector(np.ones(n), "uniform", normalized=True)


def normalize_weights(wv: WeightVector) -> WeightVector:
    """Rescale by one common factor so the mean weight is 1."""
    peak = float(wv.weights.max())
    if not peak > 0:
        raise ValueError("cannot normalize weights that sum to zero")
    # divide by the peak first so neither the sum nor the factor can overflow
    rel = wv.weights / peak
    weights = rel * (wv.weights.size / math.fsum(rel))
    return WeightVector(weights, wv.scheme, True, wv.clip_limit, wv.raw)


def density_ratio(numerator, denominator, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """``numerator / max(denominator, floor)``, elementwise."""
    if not (math.isfinite(floor) and floor > 0):
        raise ValueError(f"floor must be positive and finite, got {floor!r}")
    num = np.asarray(numerator, dtype=np.float64)
    den = np.maximum(np.asarray(denominator, dtype=np.float64), floor)
    with np.errstate(over="ignore"):
        return num / den


def _finite_traits(traits) -> np.ndarray:
    t = np.asarray(traits, dtype=np.float64)
    if t.ndim != 1:
        raise ValueError("traits must be one-dimensional")
    if t.size == 0:
        raise ValueError("traits must be non-empty")
    if not np.all(np.isfinite(t)):
        raise ValueError("traits must be finite")
    return t


def continuous_weights(traits, source: DensityModel, target: TargetSpec, *,
                       floor: float = DEFAULT_FLOOR, clip: float | None = None,
                       normalize: bool = True) -> WeightVector:
    """Weight each sample by target density over source density at its trait.

    The source density is floored at ``floor`` so the ratio stays finite.
    Samples where the target density is zero get weight zero. Clipping, when
    requested, happens before the optional mean-one normalization.
    """
    t = _finite_traits(traits)
    if clip is not None and not (math.isfinite(clip) and clip > 0):
        raise ValueError(f"clip must be positive and finite, got {clip!r}")
    raw = density_ratio(target_pdf_batch(target, t), kde_pdf_batch(source, t), floor)
    if not np.all(np.isfinite(raw)):
        raise RuntimeError("non-finite density-ratio weight after flooring")
    if clip is not None:
        raw = np.minimum(raw, clip)
    wv = WeightVector(raw, "continuous", False, clip, raw)
    return normalize_weights(wv) if normalize else wv


def bin_indices(traits, num_bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Equal-width bins over ``[min, max]``; the last bin is right-closed.

    Returns ``(index per trait, edges)``. When every trait is identical there is
    a single bin.
    """
    t = _finite_traits(traits)
    if isinstance(num_bins, bool) or int(num_bins) != num_bins or num_bins < 1:
        raise ValueError(f"number of bins must be a positive integer, got {num_bins!r}")
    num_bins = int(num_bins)
    lo, hi = float(t.min()), float(t.max())
    if lo == hi:
        return np.zeros(t.size, dtype=np.intp), np.array([lo, hi])
    if math.isfinite(hi - lo):
        edges = np.linspace(lo, hi, num_bins + 1)
    else:
        frac = np.arange(num_bins + 1) / num_bins
        edges = lo * (1.0 - frac) + hi * frac
    idx = np.searchsorted(edges, t, side="right") - 1
    return np.clip(idx, 0, num_bins - 1), edges


def discrete_weights(traits, num_bins: int = DEFAULT_BINS) -> WeightVector:
    """Binned baseline: every non-empty bin ends up with the same total weight.

    A point in a bin holding ``n_b`` of ``N`` points gets ``N / (B * n_b)``,
    where ``B`` counts the non-empty bins. The mean weight is 1 by construction.
    """
    idx, edges = bin_indices(traits, num_bins)
    counts = np.bincount(idx, minlength=edges.size - 1)
    occupied = int(np.count_nonzero(counts))
    w = idx.size / (occupied * counts[idx].astype(np.float64))
    return WeightVector(w, "discrete", normalized=True)


def _weight_array(weights, n):
    w = as_weight_array(weights, n)
    peak = float(w.max())
    if not peak > 0:
        raise ValueError("total weight must be positive")
    if peak > 1e300:
        w = w / peak
    return w, math.fsum(w)


def weighted_ks(traits, weights, target: TargetSpec) -> float:
    """Largest gap between the weighted empirical CDF and the target CDF.

    Both one-sided limits of the step function are checked at each distinct
    trait value, so this is the true supremum.
    """
    t = _finite_traits(traits)
    w, total = _weight_array(weights, t.size)
    order = np.argsort(t, kind="stable")
    ts, ws = t[order], w[order]
    cum = np.cumsum(ws) / total
    # last index of each run of equal values
    last = np.flatnonzero(np.append(ts[1:] != ts[:-1], True))
    values = ts[last]
    after = np.minimum(cum[last], 1.0)
    before = np.concatenate(([0.0], after[:-1]))
    ft = target_cdf_batch(target, values)
    gap = max(np.max(np.abs(after - ft)), np.max(np.abs(before - ft)))
    return float(min(max(gap, 0.0), 1.0))


def histogram_export(traits, weights, target: TargetSpec,
                     num_bins: int = 30) -> dict[str, np.ndarray]:
    """Per-bin counts and weighted mass next to the target density.

    Uses the same equal-width binning as :func:`discrete_weights`. The result
    maps each name in ``HISTOGRAM_COLUMNS`` to a column array.
    """
    t = _finite_traits(traits)
    w, _ = _weight_array(weights, t.size)
    idx, edges = bin_indices(t, num_bins)
    nb = edges.size - 1
    counts = np.bincount(idx, minlength=nb)
    mass = np.bincount(idx, weights=w, minlength=nb)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return {
        "bin_left": edges[:-1].copy(),
        "bin_right": edges[1:].copy(),
        "unweighted_count": counts.astype(np.int64),
        "weighted_mass": mass,
        "target_pdf_at_center": target_pdf_batch(target, centers),
    }
