"""Rebuild ``data/*.csv`` from copies of the datasets bundled in PyPI wheels.

California Housing ships as a parquet file inside ``pytorch-widedeep`` and the
Cleveland heart-disease table ships as an Orange ``.tab`` file inside
``orange3``.  Neither wheel is installed; the files are read straight out of the
archives::

    pip download --no-deps pytorch-widedeep orange3 -d wheels/
    python scripts/prepare_datasets.py wheels/ data/

The heart table is converted back to the numeric coding of the UCI
``processed.cleveland.data`` file, with ``?`` kept as the missing marker.  The
Orange copy already collapses disease stage 1-4 to 1, so ``num`` is 0/1.
"""
import csv
import glob
import io
import os
import sys
import zipfile

import pandas as pd

HEART_COLUMNS = ["age", "sex", "cp", "trestbps", "chol", "fbs", "restecg",
                 "thalach", "exang", "oldpeak", "slope", "ca", "thal", "num"]

HEART_CODES = {
    "gender": {"male": "1", "female": "0"},
    "chest pain": {"typical ang": "1", "atypical ang": "2",
                   "non-anginal": "3", "asymptomatic": "4"},
    "rest ECG": {"normal": "0", "ST-T abnormal": "1",
                 "left vent hypertrophy": "2"},
    "slope peak exc ST": {"upsloping": "1", "flat": "2", "downsloping": "3"},
    "thal": {"normal": "3", "fixed defect": "6", "reversable defect": "7"},
}


def _member(wheel_dir, pattern, name):
    matches = sorted(glob.glob(os.path.join(wheel_dir, pattern)))
    if not matches:
        raise SystemExit(f"no wheel matching {pattern} in {wheel_dir}")
    with zipfile.ZipFile(matches[-1]) as zf:
        return zf.read(name)


def _num(text):
    # integers stay integers so the CSV reads like the UCI original
    value = float(text)
    return str(int(value)) if value.is_integer() else repr(value)


def housing(wheel_dir, out_dir):
    raw = _member(wheel_dir, "pytorch_widedeep-*.whl",
                  "pytorch_widedeep/datasets/data/california_housing.parquet.brotli")
    df = pd.read_parquet(io.BytesIO(raw))
    path = os.path.join(out_dir, "california_housing.csv")
    df.to_csv(path, index=False, float_format="%.10g", lineterminator="\n")
    return path, len(df)


def heart(wheel_dir, out_dir):
    raw = _member(wheel_dir, "orange3-*.whl", "Orange/datasets/heart_disease.tab")
    lines = raw.decode("utf-8").splitlines()
    header = lines[0].split("\t")
    rows = []
    for line in lines[3:]:
        if not line.strip():
            continue
        cells = dict(zip(header, line.split("\t")))
        out = []
        for col in header:
            cell = cells[col].strip()
            if cell == "?":
                out.append("?")
            elif col in HEART_CODES:
                out.append(HEART_CODES[col][cell])
            else:
                out.append(_num(cell))
        rows.append(out)
    path = os.path.join(out_dir, "cleveland_heart.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEART_COLUMNS)
        writer.writerows(rows)
    return path, len(rows)


def main(argv):
    wheel_dir = argv[1] if len(argv) > 1 else "wheels"
    out_dir = argv[2] if len(argv) > 2 else "data"
    os.makedirs(out_dir, exist_ok=True)
    for build in (housing, heart):
        path, n = build(wheel_dir, out_dir)
        print(f"{path}: {n} rows")


if __name__ == "__main__":
    main(sys.argv)
