"""Command-line entry point.

Exit status: 0 on success, 2 when inputs fail validation, 1 on runtime errors.

    cwbal weigh data.csv --trait age --target '{"kind": "uniform", "a": 29, "b": 77}' --out w.csv
    cwbal density data.csv --trait age --grid 1001 --out kde.csv
    cwbal baseline data.csv --trait age --bins 10 --out w.csv
    cwbal reproduce --config configs/housing-linear.json
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import datasets as dsio
from .density import fit_kde, kde_pdf_batch
from .experiment import _atomic_write, load_config, median_by_scheme, reproduce
from .targets import describe_target, parse_target
from .weights import (DEFAULT_BINS, DEFAULT_FLOOR, continuous_weights,
                      discrete_weights, uniform_weights, weighted_ks)

EXIT_OK, EXIT_RUNTIME, EXIT_INVALID = 0, 1, 2


class InvalidInput(Exception):
    pass


def _read_table(path, delimiter=","):
    if not os.path.isfile(path):
        raise InvalidInput(f"input file not found: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    if not rows:
        raise InvalidInput(f"{path}: file is empty")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]
    return header, body


def _numeric_column(path, header, body, name, missing="?"):
    if name not in header:
        raise InvalidInput(f"{path}: trait column {name!r} not found in header")
    j = header.index(name)
    values = []
    for i, row in enumerate(body, start=1):
        cell = row[j].strip() if j < len(row) else ""
        if cell == missing or cell == "":
            raise InvalidInput(f"{path}: row {i}: column {name!r} is missing")
        try:
            v = float(cell)
        except ValueError:
            raise InvalidInput(f"{path}: row {i}: non-numeric {name!r} value {cell!r}") from None
        if not math.isfinite(v):
            raise InvalidInput(f"{path}: row {i}: non-finite {name!r} value")
        values.append(v)
    if not values:
        raise InvalidInput(f"{path}: no data rows")
    return np.array(values)


class _TraitSource:
    """Resolves the trait (and schema defaults) for the per-file commands."""

    def __init__(self, args):
        self.schema = dsio.load_schema(args.config) if getattr(args, "config", None) else None
        self.missing = self.schema.missing if self.schema else "?"
        self.delimiter = self.schema.delimiter if self.schema else ","
        self.path = args.input
        self.header, self.body = _read_table(args.input, self.delimiter)
        self.trait_name = args.trait
        if self.trait_name is None and self.schema is not None:
            self.trait_name = self.schema.trait
        if self.trait_name is None:
            raise InvalidInput("no trait column given (use --trait or --config)")

    def column(self, name):
        return _numeric_column(self.path, self.header, self.body, name, self.missing)

    def trait(self):
        if self.trait_name != "label":
            return self.column(self.trait_name)
        if self.schema is None:
            raise InvalidInput("trait 'label' needs a dataset schema (--config)")
        values = self.column(self.schema.label)
        if self.schema.label_transform == "natural_log":
            if np.any(values <= 0):
                raise InvalidInput("natural_log label transform needs positive labels")
            return np.log(values)
        if self.schema.label_transform == "binarize":
            return (values > 0).astype(np.float64)
        return values

    def target(self, text):
        if text is None:
            if self.schema is None or self.schema.target is None:
                raise InvalidInput("no target given (use --target or a schema with a target)")
            obj = self.schema.target
        elif os.path.isfile(text):
            with open(text) as fh:
                obj = fh.read()
        else:
            obj = text
        if isinstance(obj, str):
            try:
                obj = json.loads(obj)
            except json.JSONDecodeError as exc:
                raise InvalidInput(f"target spec is not valid JSON: {exc}") from None
        columns = {}
        ref = obj.get("reference_column") if isinstance(obj, dict) else None
        if ref is not None and "reference" not in obj:
            columns[ref] = self.trait() if ref in ("label", self.trait_name) else self.column(ref)
        return parse_target(obj, columns)

    def write_with_weights(self, out, weights):
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter=self.delimiter, lineterminator="\n")
        writer.writerow(self.header + ["weight"])
        for row, w in zip(self.body, weights):
            writer.writerow(list(row) + [repr(float(w))])
        _atomic_write(out, buf.getvalue())


def cmd_weigh(args) -> int:
    src = _TraitSource(args)
    traits = src.trait()
    target = src.target(args.target)
    source = fit_kde(traits)
    wv = continuous_weights(traits, source, target, floor=args.floor, clip=args.clip,
                            normalize=not args.no_normalize)
    src.write_with_weights(args.out, wv.weights)
    before = weighted_ks(traits, uniform_weights(traits.size), target)
    after = weighted_ks(traits, wv, target)
    w = wv.weights
    print(f"n={traits.size} bandwidth={source.bandwidth:.6g} target={describe_target(target)}")
    print(f"weight min={w.min():.6g} mean={w.mean():.6g} max={w.max():.6g}")
    print(f"weighted KS before={before:.4f} after={after:.4f}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_density(args) -> int:
    src = _TraitSource(args)
    if args.grid < 2:
        raise InvalidInput("grid size must be at least 2")
    traits = src.trait()
    model = fit_kde(traits, args.bandwidth)
    h = model.bandwidth
    xs = np.linspace(traits.min() - 4 * h, traits.max() + 4 * h, args.grid)
    dens = kde_pdf_batch(model, xs)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "density"])
    writer.writerows([repr(float(x)), repr(float(d))] for x, d in zip(xs, dens))
    _atomic_write(args.out, buf.getvalue())
    print(f"n={model.n} bandwidth={h:.6g} grid={args.grid} wrote {args.out}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    src = _TraitSource(args)
    traits = src.trait()
    wv = discrete_weights(traits, args.bins)
    src.write_with_weights(args.out, wv.weights)
    w = wv.weights
    print(f"n={traits.size} bins={args.bins} weight min={w.min():.6g} "
          f"mean={w.mean():.6g} max={w.max():.6g}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if not os.path.isfile(args.config):
        raise InvalidInput(f"config not found: {args.config}")
    cfg = load_config(args.config, seeds=args.seeds, bins=args.bins, floor=args.floor,
                      clip=args.clip, normalize=False if args.no_normalize else None,
                      out=os.path.abspath(args.out) if args.out else None)
    reports = reproduce(cfg)
    medians = median_by_scheme(reports)
    metric = reports[0].metric
    for scheme in cfg.schemes:
        print(f"{scheme:<11} median {metric} = {medians[scheme]:.4f}")
    print(f"{len(reports)} reports written to {cfg.out}")
    return EXIT_OK


def _positive(kind):
    def check(text):
        try:
            value = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return value
    return check


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cwbal", description=(
        "Continuous weight balancing: density-ratio sample weights for a skewed trait."))
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def per_file(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", help="input CSV with a header row")
        p.add_argument("--trait", help="trait column, or 'label' with --config")
        p.add_argument("--config", help="dataset schema JSON supplying trait/target defaults")
        p.add_argument("--out", required=True, help="output CSV")
        return p

    p = per_file("weigh", "append continuous density-ratio weights")
    p.add_argument("--target", help="target spec as JSON text or a JSON file")
    p.add_argument("--floor", type=_positive(float), default=DEFAULT_FLOOR)
    p.add_argument("--clip", type=_positive(float), default=None)
    p.add_argument("--no-normalize", action="store_true")
    p.set_defaults(func=cmd_weigh)

    p = per_file("density", "dump the trait KDE on an even grid")
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--bandwidth", type=_positive(float), default=None)
    p.set_defaults(func=cmd_density)

    p = per_file("baseline", "append binned (discrete) baseline weights")
    p.add_argument("--bins", type=_positive(int), default=DEFAULT_BINS)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("reproduce", help="run the scheme comparison from a config")
    p.add_argument("--config", required=True, help="reproduction config JSON")
    p.add_argument("--seeds", type=int, nargs="+", default=None)
    p.add_argument("--bins", type=_positive(int), default=None)
    p.add_argument("--floor", type=_positive(float), default=None)
    p.add_argument("--clip", type=_positive(float), default=None)
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInput, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"cwbal {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"cwbal {args.command}: runtime failure: {exc!r}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
