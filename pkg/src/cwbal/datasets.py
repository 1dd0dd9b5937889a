"""CSV ingestion, trait selection, seeded splits and evaluation subsets.

A dataset schema is a JSON file such as::

    {
      "name": "heart",
      "path": "../data/cleveland_heart.csv",
      "task": "classification",
      "features": ["age", "sex", ...],
      "label": "num",
      "label_transform": "binarize",
      "trait": "age",
      "missing": "?",
      "subset": {"column": "age", "op": "<", "threshold": 60},
      "target": {"kind": "uniform", "a": 29, "b": 77}
    }

``path`` is resolved relative to the schema file. ``trait`` is either a column
name or the literal ``"label"`` (the transformed label).
"""
from __future__ import annotations

import csv
import json
import logging
import math
import operator
import os
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

LABEL_TRANSFORMS = ("none", "natural_log", "binarize")
TASKS = ("regression", "classification")

_OPS = {"<": operator.lt, ">": operator.gt, "<=": operator.le, ">=": operator.ge}
_NEGATED = {"<": ">=", ">": "<=", "<=": ">", ">=": "<"}
_OP_ALIASES = {"≤": "<=", "≥": ">="}


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix, labels and trait for ``n`` complete rows."""

    columns: tuple[str, ...]
    features: np.ndarray
    labels: np.ndarray
    trait: np.ndarray
    label_name: str = "label"
    trait_name: str = "trait"
    name: str = "dataset"
    dropped_rows: int = 0

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.array(self.labels, dtype=np.float64)
        t = np.array(self.trait, dtype=np.float64)
        n = X.shape[0]
        if n < 1:
            raise ValueError("a dataset needs at least one row")
        if y.shape != (n,) or t.shape != (n,):
            raise ValueError(f"features ({n} rows), labels {y.shape} and trait {t.shape} disagree")
        if len(self.columns) != X.shape[1]:
            raise ValueError(f"{len(self.columns)} column names for {X.shape[1]} features")
        for arr, what in ((X, "features"), (y, "labels"), (t, "trait")):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{what} contain non-finite values")
            arr.setflags(write=False)
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "trait", t)

    def __len__(self):
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def column(self, name: str) -> np.ndarray:
        """Look up ``"label"``, ``"trait"``, the label/trait names, or a feature."""
        if name in ("label", self.label_name):
            return self.labels
        if name in ("trait", self.trait_name):
            return self.trait
        if name in self.columns:
            return self.features[:, self.columns.index(name)]
        raise KeyError(f"dataset {self.name!r} has no column {name!r}")

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return replace(self, features=self.features[rows], labels=self.labels[rows],
                       trait=self.trait[rows], dropped_rows=0)


@dataclass(frozen=True)
class SubsetRule:
    column: str
    op: str
    threshold: float

    def __post_init__(self):
        op = _OP_ALIASES.get(self.op, self.op)
        if op not in _OPS:
            raise ValueError(f"unknown comparator {self.op!r}; use one of < > <= >=")
        if not math.isfinite(self.threshold):
            raise ValueError("subset threshold must be finite")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "threshold", float(self.threshold))

    def mask(self, ds: Dataset) -> np.ndarray:
        return _OPS[self.op](ds.column(self.column), self.threshold)

    def negated(self) -> "SubsetRule":
        return SubsetRule(self.column, _NEGATED[self.op], self.threshold)

    def describe(self) -> str:
        return f"{self.column} {self.op} {self.threshold:g}"

    def to_dict(self) -> dict:
        return {"column": self.column, "op": self.op, "threshold": self.threshold}

    @classmethod
    def from_dict(cls, obj) -> "SubsetRule":
        try:
            return cls(str(obj["column"]), str(obj["op"]), float(obj["threshold"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"subset rule needs column, op and threshold: {obj!r}") from exc


@dataclass(frozen=True)
class DatasetSchema:
    features: tuple[str, ...]
    label: str
    trait: str = "label"
    label_transform: str = "none"
    missing: str = "?"
    delimiter: str = ","
    task: str = "regression"
    name: str = "dataset"
    path: str | None = None
    subset: SubsetRule | None = None
    target: dict | None = field(default=None, hash=False)

    def __post_init__(self):
        if self.label_transform not in LABEL_TRANSFORMS:
            raise ValueError(f"unknown label transform {self.label_transform!r}; "
                             f"expected one of {', '.join(LABEL_TRANSFORMS)}")
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if not self.features:
            raise ValueError("schema declares no feature columns")
        object.__setattr__(self, "features", tuple(self.features))


def load_schema(path) -> DatasetSchema:
    """Read a dataset schema file; relative data paths resolve next to it."""
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from None
    for key in ("features", "label"):
        if key not in obj:
            raise ValueError(f"{path}: schema is missing {key!r}")
    data_path = obj.get("path")
    if data_path is not None and not os.path.isabs(data_path):
        data_path = os.path.normpath(os.path.join(os.path.dirname(os.path.abspath(path)), data_path))
    subset = obj.get("subset")
    return DatasetSchema(
        features=tuple(obj["features"]),
        label=obj["label"],
        trait=obj.get("trait", "label"),
        label_transform=obj.get("label_transform", "none"),
        missing=obj.get("missing", "?"),
        delimiter=obj.get("delimiter", ","),
        task=obj.get("task", "regression"),
        name=obj.get("name", os.path.splitext(os.path.basename(path))[0]),
        path=data_path,
        subset=SubsetRule.from_dict(subset) if subset else None,
        target=obj.get("target"),
    )


def read_csv_columns(path, columns: Sequence[str], missing: str = "?",
                     delimiter: str = ","):
    """Read the named columns as floats.

    Returns ``(matrix, dropped)`` where rows holding the missing marker in any
    requested column are dropped and counted. Any other non-numeric cell is an
    error naming its (1-based, header excluded) row.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        positions = []
        for col in columns:
            if col not in header:
                raise ValueError(f"{path}: column {col!r} not found in header")
            positions.append(header.index(col))
        rows, dropped = [], 0
        for lineno, record in enumerate(reader, start=1):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != len(header):
                raise ValueError(f"{path}: row {lineno} has {len(record)} fields, "
                                 f"header has {len(header)}")
            cells = [record[p].strip() for p in positions]
            if any(c == missing for c in cells):
                dropped += 1
                continue
            try:
                values = [float(c) for c in cells]
            except ValueError:
                bad = next(c for c in cells if not _is_float(c))
                raise ValueError(f"{path}: row {lineno}: non-numeric value {bad!r}") from None
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"{path}: row {lineno}: non-finite value")
            rows.append(values)
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), len(columns))
    return matrix, dropped


def _is_float(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_csv(path, schema: DatasetSchema) -> Dataset:
    """Load a CSV according to ``schema``, dropping incomplete rows."""
    used = list(schema.features)
    if schema.label not in used:
        used.append(schema.label)
    if schema.trait != "label" and schema.trait not in used:
        used.append(schema.trait)
    matrix, dropped = read_csv_columns(path, used, schema.missing, schema.delimiter)
    if matrix.shape[0] == 0:
        raise ValueError(f"{path}: no usable rows")
    if dropped:
        logger.info("%s: dropped %d rows with missing values", path, dropped)

    raw_label = matrix[:, used.index(schema.label)]
    if schema.label_transform == "natural_log":
        if np.any(raw_label <= 0):
            raise ValueError(f"{path}: natural_log transform needs positive labels")
        labels = np.log(raw_label)
    elif schema.label_transform == "binarize":
        labels = (raw_label > 0).astype(np.float64)
    else:
        labels = raw_label
    if schema.trait == "label":
        trait, trait_name = labels, schema.label
    else:
        trait, trait_name = matrix[:, used.index(schema.trait)], schema.trait
    X = matrix[:, [used.index(c) for c in schema.features]]
    return Dataset(schema.features, X, labels, trait, schema.label, trait_name,
                   schema.name, dropped)


def train_test_split(ds: Dataset, test_fraction: float = 0.2, seed: int = 0):
    """Seeded split; the test part has ``round(n * test_fraction)`` rows.

    Both parts keep the original row order.
    """
    if not (0.0 < test_fraction < 1.0):
        raise ValueError(f"test fraction must be in (0, 1), got {test_fraction!r}")
    n = len(ds)
    n_test = int(round(n * test_fraction))
    if n_test < 1 or n_test >= n:
        raise ValueError(f"test fraction {test_fraction} leaves an empty part for n={n}")
    train_idx, test_idx = split_indices(n, n_test, seed)
    return ds.take(train_idx), ds.take(test_idx)


def split_indices(n: int, n_test: int, seed: int):
    """Sorted ``(train, test)`` row indices from a seeded permutation."""
    perm = np.random.default_rng(seed).permutation(n)
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])


def apply_subset(ds: Dataset, rule: SubsetRule) -> Dataset:
    """Keep the rows satisfying ``rule``, in order. An empty result is an error."""
    keep = np.flatnonzero(rule.mask(ds))
    if keep.size == 0:
        raise ValueError(f"subset '{rule.describe()}' selects no rows of {ds.name!r}")
    return ds.take(keep)
