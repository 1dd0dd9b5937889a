"""Target trait distributions: Normal, Uniform, or an empirical KDE.

Targets are parsed from small JSON-style mappings::

    {"kind": "normal", "mu": 3, "sigma": 1}
    {"kind": "uniform", "a": 29, "b": 77}
    {"kind": "empirical", "reference_column": "age"}
    {"kind": "empirical", "reference": [1.0, 2.5, 4.0]}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np
from scipy.special import ndtr

from .density import SQRT_2PI, DensityModel, fit_kde, kde_cdf_batch, kde_pdf_batch

KINDS = ("normal", "uniform", "empirical")


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise ValueError(f"normal target needs a finite mu, got {self.mu!r}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"normal target needs sigma > 0, got {self.sigma!r}")


@dataclass(frozen=True)
class Uniform:
    """Uniform density on the closed interval ``[a, b]``."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"uniform bounds must be finite, got a={self.a!r}, b={self.b!r}")
        if not self.a < self.b:
            raise ValueError(f"uniform target needs a < b, got a={self.a!r}, b={self.b!r}")


@dataclass(frozen=True, eq=False)
class Empirical:
    """KDE over a reference sample, Scott's-rule bandwidth unless given."""

    model: DensityModel
    reference_column: str | None = None

    @classmethod
    def from_sample(cls, reference, bandwidth=None, reference_column=None) -> "Empirical":
        ref = np.asarray(reference, dtype=np.float64)
        if ref.size == 0:
            raise ValueError("empirical target needs a non-empty reference sample")
        return cls(fit_kde(ref, bandwidth), reference_column)

    def __eq__(self, other):
        if not isinstance(other, Empirical):
            return NotImplemented
        return (self.reference_column == other.reference_column
                and self.model.bandwidth == other.model.bandwidth
                and np.array_equal(self.model.samples, other.model.samples))

    __hash__ = None


TargetSpec = Union[Normal, Uniform, Empirical]


def _check_x(xs) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    if not np.all(np.isfinite(arr)):
        raise ValueError("target density queried at a non-finite point")
    return arr


def target_pdf_batch(spec: TargetSpec, xs) -> np.ndarray:
    x = _check_x(xs)
    if isinstance(spec, Normal):
        with np.errstate(over="ignore", under="ignore"):
            z = (x - spec.mu) / spec.sigma
            return np.exp(-0.5 * z * z) / (spec.sigma * SQRT_2PI)
    if isinstance(spec, Uniform):
        inside = (x >= spec.a) & (x <= spec.b)
        return np.where(inside, 1.0 / (spec.b - spec.a), 0.0)
    if isinstance(spec, Empirical):
        return kde_pdf_batch(spec.model, x)
    raise TypeError(f"not a target spec: {spec!r}")


def target_pdf(spec: TargetSpec, x: float) -> float:
    return float(target_pdf_batch(spec, [x])[0])


def target_cdf_batch(spec: TargetSpec, xs) -> np.ndarray:
    x = _check_x(xs)
    if isinstance(spec, Normal):
        with np.errstate(over="ignore"):
            return ndtr((x - spec.mu) / spec.sigma)
    if isinstance(spec, Uniform):
        return np.clip((x - spec.a) / (spec.b - spec.a), 0.0, 1.0)
    if isinstance(spec, Empirical):
        return kde_cdf_batch(spec.model, x)
    raise TypeError(f"not a target spec: {spec!r}")


def _number(obj: Mapping, key: str, kind: str) -> float:
    if key not in obj:
        raise ValueError(f"{kind} target is missing field {key!r}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{kind} target field {key!r} must be a number, got {value!r}")
    return float(value)


def parse_target(obj, columns: Mapping[str, np.ndarray] | None = None) -> TargetSpec:
    """Build a validated target from a mapping or a JSON string.

    ``columns`` resolves ``reference_column`` for empirical targets.
    """
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ValueError(f"target spec is not valid JSON: {exc}") from None
    if not isinstance(obj, Mapping):
        raise ValueError(f"target spec must be a mapping, got {type(obj).__name__}")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise ValueError(f"unknown target kind {kind!r}; expected one of {', '.join(KINDS)}")

    if kind == "normal":
        return Normal(_number(obj, "mu", kind), _number(obj, "sigma", kind))
    if kind == "uniform":
        return Uniform(_number(obj, "a", kind), _number(obj, "b", kind))

    bandwidth = obj.get("bandwidth")
    if bandwidth is not None:
        bandwidth = _number(obj, "bandwidth", kind)
        if not bandwidth > 0:
            raise ValueError(f"empirical target bandwidth must be positive, got {bandwidth!r}")
    column = obj.get("reference_column")
    if "reference" in obj:
        reference = obj["reference"]
    elif column is not None:
        if columns is None or column not in columns:
            raise ValueError(f"empirical target reference column {column!r} is not available")
        reference = columns[column]
    else:
        raise ValueError("empirical target needs 'reference' or 'reference_column'")
    reference = np.asarray(reference, dtype=np.float64)
    if reference.size == 0:
        raise ValueError("empirical target needs a non-empty reference sample")
    return Empirical.from_sample(reference, bandwidth, column)


def serialize_target(spec: TargetSpec) -> dict:
    """Inverse of :func:`parse_target`; empirical targets embed their sample."""
    if isinstance(spec, Normal):
        return {"kind": "normal", "mu": spec.mu, "sigma": spec.sigma}
    if isinstance(spec, Uniform):
        return {"kind": "uniform", "a": spec.a, "b": spec.b}
    if isinstance(spec, Empirical):
        out = {"kind": "empirical",
               "reference": spec.model.samples.tolist(),
               "bandwidth": spec.model.bandwidth}
        if spec.reference_column is not None:
            out["reference_column"] = spec.reference_column
        return out
    raise TypeError(f"not a target spec: {spec!r}")


def describe_target(spec: TargetSpec) -> str:
    if isinstance(spec, Normal):
        return f"N({spec.mu:g}, {spec.sigma:g})"
    if isinstance(spec, Uniform):
        return f"U({spec.a:g}, {spec.b:g})"
    name = spec.reference_column or "reference"
    return f"KDE({name}, n={spec.model.n}, h={spec.model.bandwidth:.4g})"
