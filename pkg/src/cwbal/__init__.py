"""Continuous weight balancing.

Estimate the distribution of a continuous trait with a Gaussian KDE, choose a
target distribution, and weight every sample by ``f_target(t) / f_source(t)``.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .datasets import (Dataset, DatasetSchema, SubsetRule, apply_subset, load_csv,
                       load_schema, train_test_split)
from .density import DensityModel, fit_kde, kde_pdf, kde_pdf_batch, scotts_bandwidth
from .experiment import EvalReport, ExperimentOptions, run_experiment
from .models import (LinearModel, LogisticModel, auroc, fit_weighted_linear,
                     fit_weighted_logistic, r2_score)
from .targets import (Empirical, Normal, Uniform, parse_target, serialize_target,
                      target_pdf)
from .weights import (WeightVector, continuous_weights, discrete_weights,
                      histogram_export, normalize_weights, weighted_ks)

__all__ = [
    "BACKEND", "Dataset", "DatasetSchema", "DensityModel", "Empirical", "EvalReport",
    "ExperimentOptions", "LinearModel", "LogisticModel", "Normal", "SubsetRule",
    "Uniform", "WeightVector", "apply_subset", "auroc", "continuous_weights",
    "discrete_weights", "fit_kde", "fit_weighted_linear", "fit_weighted_logistic",
    "histogram_export", "kde_pdf", "kde_pdf_batch", "load_csv", "load_schema",
    "normalize_weights", "parse_target", "r2_score", "run_experiment",
    "scotts_bandwidth", "serialize_target", "target_pdf", "train_test_split",
    "weighted_ks",
]
