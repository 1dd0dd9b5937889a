"""Split, weight, fit, and score on an evaluation subset.

A reproduction config is a JSON file; paths are relative to the config::

    {
      "schema": "../datasets/housing.json",
      "model": "linear",
      "schemes": ["none", "discrete", "continuous"],
      "seeds": [0, 1, 2, 3, 4],
      "test_fraction": 0.2,
      "bins": 10,
      "hist_bins": 30,
      "weights": {"floor": 1e-12, "clip": null, "normalize": true},
      "ridge": 1e-8,
      "l2": 1e-4,
      "out": "../runs/housing-linear"
    }

``target`` and ``subset`` default to the ones declared in the dataset schema.
"""
from __future__ import annotations

import csv
import io
import json
import os
import statistics
import tempfile
from dataclasses import asdict, dataclass, field, replace

from . import datasets as dsio
from .density import fit_kde
from .models import (DEFAULT_L2, DEFAULT_RIDGE, auroc, fit_weighted_linear,
                     fit_weighted_logistic, r2_score)
from .targets import Empirical, TargetSpec, parse_target
from .weights import (DEFAULT_BINS, DEFAULT_FLOOR, HISTOGRAM_COLUMNS, WeightVector,
                      continuous_weights, discrete_weights, histogram_export,
                      uniform_weights)

SCHEME_NAMES = ("none", "discrete", "continuous")
MODEL_KINDS = {"linear": "regression", "logistic": "classification"}
REPORT_FIELDS = ("dataset", "model", "scheme", "seed", "metric", "value",
                 "subset", "n_train", "n_eval")


@dataclass(frozen=True)
class ExperimentOptions:
    test_fraction: float = 0.2
    bins: int = DEFAULT_BINS
    floor: float = DEFAULT_FLOOR
    clip: float | None = None
    normalize: bool = True
    ridge: float = DEFAULT_RIDGE
    l2: float = DEFAULT_L2


@dataclass(frozen=True)
class EvalReport:
    dataset: str
    model: str
    scheme: str
    seed: int
    metric: str
    value: float
    subset: str
    n_train: int
    n_eval: int

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, line: str) -> "EvalReport":
        return cls(**json.loads(line))


def training_weights(train: dsio.Dataset, scheme: str, target: TargetSpec | None,
                     options: ExperimentOptions = ExperimentOptions()) -> WeightVector:
    """Weights for the training rows; the KDE only ever sees training traits."""
    if scheme == "none":
        return uniform_weights(len(train))
    if scheme == "discrete":
        return discrete_weights(train.trait, options.bins)
    if scheme == "continuous":
        if target is None:
            raise ValueError("continuous weighting needs a target distribution")
        return continuous_weights(train.trait, fit_kde(train.trait), target,
                                  floor=options.floor, clip=options.clip,
                                  normalize=options.normalize)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {', '.join(SCHEME_NAMES)}")


def _resolve_target(target, train: dsio.Dataset):
    if target is None or not isinstance(target, (dict, str)):
        return target
    columns = {name: train.column(name) for name in train.columns}
    columns.setdefault(train.label_name, train.labels)
    columns.setdefault(train.trait_name, train.trait)
    return parse_target(target, columns)


def run_experiment(ds: dsio.Dataset, model: str, scheme: str, target, subset: dsio.SubsetRule,
                   seed: int, options: ExperimentOptions = ExperimentOptions()) -> EvalReport:
    """One (model, scheme, seed) cell of the comparison table.

    ``target`` may be a parsed spec or its JSON mapping; an empirical
    ``reference_column`` is then read from the training split.
    """
    if model not in MODEL_KINDS:
        raise ValueError(f"unknown model {model!r}; expected linear or logistic")
    train, test = dsio.train_test_split(ds, options.test_fraction, seed)
    evaluation = dsio.apply_subset(test, subset)
    wv = training_weights(train, scheme, _resolve_target(target, train), options)
    if model == "linear":
        fitted = fit_weighted_linear(train.features, train.labels, wv, options.ridge)
        metric = "R2"
        value = r2_score(evaluation.labels, fitted.predict(evaluation.features))
    else:
        fitted = fit_weighted_logistic(train.features, train.labels, wv, options.l2)
        metric = "AUROC"
        value = auroc(evaluation.labels, fitted.decision_function(evaluation.features))
    return EvalReport(ds.name, model, scheme, int(seed), metric, value,
                      subset.describe(), len(train), len(evaluation))


@dataclass(frozen=True)
class RunConfig:
    schema_path: str
    model: str
    schemes: tuple[str, ...] = SCHEME_NAMES
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    target: dict | None = field(default=None, hash=False)
    subset: dsio.SubsetRule | None = None
    options: ExperimentOptions = ExperimentOptions()
    hist_bins: int = 30
    out: str = "runs"

    def validate(self) -> None:
        if not os.path.isfile(self.schema_path):
            raise FileNotFoundError(f"dataset schema not found: {self.schema_path}")
        if self.model not in MODEL_KINDS:
            raise ValueError(f"unknown model {self.model!r}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if not self.schemes or any(s not in SCHEME_NAMES for s in self.schemes):
            raise ValueError(f"schemes must be drawn from {', '.join(SCHEME_NAMES)}")
        if not 0.0 < self.options.test_fraction < 1.0:
            raise ValueError("test_fraction must be in (0, 1)")
        if self.options.bins < 1 or self.hist_bins < 1:
            raise ValueError("bin counts must be positive")


def load_config(path, **overrides) -> RunConfig:
    """Read a reproduction config. Keyword overrides that are not None win."""
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from None
    base = os.path.dirname(os.path.abspath(path))

    def rel(p):
        return p if os.path.isabs(p) else os.path.normpath(os.path.join(base, p))

    if "schema" not in obj:
        raise ValueError(f"{path}: config needs a 'schema' entry")
    if "model" not in obj:
        raise ValueError(f"{path}: config needs a 'model' entry")
    wopts = obj.get("weights", {})
    options = ExperimentOptions(
        test_fraction=float(obj.get("test_fraction", 0.2)),
        bins=int(obj.get("bins", DEFAULT_BINS)),
        floor=float(wopts.get("floor", DEFAULT_FLOOR)),
        clip=None if wopts.get("clip") is None else float(wopts["clip"]),
        normalize=bool(wopts.get("normalize", True)),
        ridge=float(obj.get("ridge", DEFAULT_RIDGE)),
        l2=float(obj.get("l2", DEFAULT_L2)),
    )
    subset = obj.get("subset")
    cfg = RunConfig(
        schema_path=rel(obj["schema"]),
        model=obj["model"],
        schemes=tuple(obj.get("schemes", SCHEME_NAMES)),
        seeds=tuple(int(s) for s in obj.get("seeds", (0, 1, 2, 3, 4))),
        target=obj.get("target"),
        subset=dsio.SubsetRule.from_dict(subset) if subset else None,
        options=options,
        hist_bins=int(obj.get("hist_bins", 30)),
        out=rel(obj.get("out", "runs")),
    )
    option_keys = {"bins", "floor", "clip", "normalize", "test_fraction", "ridge", "l2"}
    opt_over = {k: v for k, v in overrides.items() if k in option_keys and v is not None}
    top_over = {k: v for k, v in overrides.items() if k not in option_keys and v is not None}
    if "seeds" in top_over:
        top_over["seeds"] = tuple(int(s) for s in top_over["seeds"])
    return replace(cfg, options=replace(cfg.options, **opt_over), **top_over)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise FileNotFoundError(f"output directory does not exist: {directory}")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def histogram_csv(table: dict) -> str:
    cols = [table[c] for c in HISTOGRAM_COLUMNS]
    rows = []
    for i in range(len(cols[0])):
        rows.append([repr(float(cols[0][i])), repr(float(cols[1][i])), int(cols[2][i]),
                     repr(float(cols[3][i])), repr(float(cols[4][i]))])
    return _csv_text(HISTOGRAM_COLUMNS, rows)


def summarize(reports, schemes, seeds) -> str:
    """Median per scheme with per-seed values, four decimals."""
    header = ["scheme", "metric", "median"] + [f"seed_{s}" for s in seeds]
    rows = []
    for scheme in schemes:
        mine = {r.seed: r for r in reports if r.scheme == scheme}
        values = [mine[s].value for s in seeds]
        rows.append([scheme, mine[seeds[0]].metric, f"{statistics.median(values):.4f}"]
                    + [f"{v:.4f}" for v in values])
    return _csv_text(header, rows)


def reproduce(cfg: RunConfig) -> list[EvalReport]:
    """Run every (scheme, seed) pair and write reports, summary and histograms.

    Writes ``reports.jsonl``, ``summary.csv`` and ``hist_<scheme>.csv`` (the
    training split of the first seed) into ``cfg.out``.
    """
    cfg.validate()
    schema = dsio.load_schema(cfg.schema_path)
    if schema.path is None or not os.path.isfile(schema.path):
        raise FileNotFoundError(f"data file for schema {cfg.schema_path} not found: {schema.path}")
    if MODEL_KINDS[cfg.model] != schema.task:
        raise ValueError(f"model {cfg.model!r} does not fit a {schema.task} dataset")
    target = cfg.target if cfg.target is not None else schema.target
    subset = cfg.subset if cfg.subset is not None else schema.subset
    if subset is None:
        raise ValueError("no evaluation subset configured")
    if "continuous" in cfg.schemes and target is None:
        raise ValueError("continuous scheme requested but no target configured")

    ds = dsio.load_csv(schema.path, schema)
    reports = [run_experiment(ds, cfg.model, scheme, target, subset, seed, cfg.options)
               for scheme in cfg.schemes for seed in cfg.seeds]

    os.makedirs(cfg.out, exist_ok=True)
    _atomic_write(os.path.join(cfg.out, "reports.jsonl"),
                  "".join(r.to_json() + "\n" for r in reports))
    _atomic_write(os.path.join(cfg.out, "summary.csv"),
                  summarize(reports, cfg.schemes, cfg.seeds))

    train, _ = dsio.train_test_split(ds, cfg.options.test_fraction, cfg.seeds[0])
    resolved = _resolve_target(target, train)
    for scheme in cfg.schemes:
        wv = training_weights(train, scheme, resolved, cfg.options)
        hist_target = resolved if resolved is not None else _trait_density(train)
        table = histogram_export(train.trait, wv, hist_target, cfg.hist_bins)
        _atomic_write(os.path.join(cfg.out, f"hist_{scheme}.csv"), histogram_csv(table))
    return reports


def _trait_density(train):
    return Empirical(fit_kde(train.trait))


def median_by_scheme(reports) -> dict[str, float]:
    out = {}
    for r in reports:
        out.setdefault(r.scheme, []).append(r.value)
    return {k: statistics.median(v) for k, v in out.items()}
