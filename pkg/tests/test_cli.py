import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.integrate import trapezoid

from cwbal.cli import main

from conftest import HEART_CONFIG, HEART_SCHEMA, HOUSING_SCHEMA, ROOT


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_weigh_housing_from_schema(tmp_path, capsys):
    from cwbal import load_schema
    src = load_schema(HOUSING_SCHEMA).path
    out = str(tmp_path / "w.csv")
    assert main(["weigh", src, "--config", HOUSING_SCHEMA, "--out", out]) == 0
    rows_in, rows_out = _rows(src), _rows(out)
    assert len(rows_out) == len(rows_in) == 20641
    assert rows_out[0] == rows_in[0] + ["weight"]
    assert all(len(r) == len(rows_in[0]) + 1 for r in rows_out)
    w = np.array([float(r[-1]) for r in rows_out[1:]])
    assert abs(w.mean() - 1.0) <= 1e-9
    text = capsys.readouterr().out
    assert "n=20640" in text and "N(3, 1)" in text and "weighted KS before=" in text


def test_weigh_explicit_target_json(tmp_path):
    src = _write(tmp_path, "a.csv", "t,x\n1,5\n2,6\n3,7\n4,8\n")
    out = str(tmp_path / "w.csv")
    target = json.dumps({"kind": "uniform", "a": 0, "b": 5})
    assert main(["weigh", src, "--trait", "t", "--target", target, "--out", out]) == 0
    assert len(_rows(out)) == 5


def test_weigh_target_from_file_and_no_normalize(tmp_path):
    src = _write(tmp_path, "a.csv", "t\n1\n2\n3\n")
    spec = _write(tmp_path, "t.json", '{"kind": "normal", "mu": 2, "sigma": 1}')
    out = str(tmp_path / "w.csv")
    assert main(["weigh", src, "--trait", "t", "--target", spec, "--no-normalize",
                 "--clip", "0.5", "--out", out]) == 0
    w = [float(r[-1]) for r in _rows(out)[1:]]
    assert max(w) <= 0.5


def test_weigh_empirical_identity(tmp_path):
    src = _write(tmp_path, "a.csv", "age,y\n40,1\n52,0\n61,1\n70,0\n45,1\n")
    out = str(tmp_path / "w.csv")
    target = '{"kind": "empirical", "reference_column": "age"}'
    assert main(["weigh", src, "--trait", "age", "--target", target, "--out", out]) == 0
    w = [float(r[-1]) for r in _rows(out)[1:]]
    assert w == [1.0] * 5


def test_weigh_missing_trait_column(tmp_path, capsys):
    src = _write(tmp_path, "a.csv", "t,x\n1,5\n")
    code = main(["weigh", src, "--trait", "height", "--target",
                 '{"kind": "normal", "mu": 0, "sigma": 1}', "--out", str(tmp_path / "o.csv")])
    assert code == 2
    assert "height" in capsys.readouterr().err
    assert not os.path.exists(tmp_path / "o.csv")


@pytest.mark.parametrize("target", ['{"kind": "normal", "mu": 0}', "{oops",
                                    '{"kind": "gamma"}'])
def test_weigh_bad_target_is_validation_error(tmp_path, target):
    src = _write(tmp_path, "a.csv", "t\n1\n2\n")
    assert main(["weigh", src, "--trait", "t", "--target", target,
                 "--out", str(tmp_path / "o.csv")]) == 2


def test_weigh_non_numeric_and_missing_file(tmp_path, capsys):
    src = _write(tmp_path, "a.csv", "t\n1\nabc\n")
    args = ["--trait", "t", "--target", '{"kind": "normal", "mu": 0, "sigma": 1}',
            "--out", str(tmp_path / "o.csv")]
    assert main(["weigh", src] + args) == 2
    assert "row 2" in capsys.readouterr().err
    assert main(["weigh", str(tmp_path / "nope.csv")] + args) == 2


def test_runtime_failures_exit_1(tmp_path, monkeypatch):
    src = _write(tmp_path, "a.csv", "t\n1\n2\n")
    # output path is an existing directory
    assert main(["baseline", src, "--trait", "t", "--out", str(tmp_path)]) == 1

    def boom(*args, **kwargs):
        raise RuntimeError("non-finite density-ratio weight after flooring")

    monkeypatch.setattr("cwbal.cli.continuous_weights", boom)
    assert main(["weigh", src, "--trait", "t", "--target",
                 '{"kind": "normal", "mu": 0, "sigma": 1}',
                 "--out", str(tmp_path / "o.csv")]) == 1


def test_missing_output_directory_is_validation_error(tmp_path, capsys):
    src = _write(tmp_path, "a.csv", "t\n1\n2\n")
    out = str(tmp_path / "no-such-dir" / "o.csv")
    assert main(["baseline", src, "--trait", "t", "--out", out]) == 2
    assert "output directory" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["density"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["baseline", "x.csv", "--trait", "t", "--bins", "0", "--out", "o.csv"])
    assert exc.value.code == 2


def test_density_single_sample(tmp_path):
    src = _write(tmp_path, "a.csv", "t\n0\n")
    out = str(tmp_path / "d.csv")
    assert main(["density", src, "--trait", "t", "--grid", "3", "--bandwidth", "1",
                 "--out", out]) == 0
    rows = _rows(out)
    assert rows[0] == ["x", "density"] and len(rows) == 4
    assert [float(r[0]) for r in rows[1:]] == [-4.0, 0.0, 4.0]
    assert round(float(rows[2][1]), 4) == 0.3989


@pytest.mark.parametrize("grid", [1001, 2048])
def test_density_dump_integrates_to_one(tmp_path, grid):
    from cwbal import load_schema
    src = load_schema(HEART_SCHEMA).path
    out = str(tmp_path / "d.csv")
    assert main(["density", src, "--config", HEART_SCHEMA, "--grid", str(grid),
                 "--out", out]) == 0
    data = np.array([[float(v) for v in r] for r in _rows(out)[1:]])
    assert data.shape == (grid, 2)
    assert np.all(np.diff(data[:, 0]) > 0)
    assert abs(trapezoid(data[:, 1], data[:, 0]) - 1.0) <= 1e-2


def test_density_grid_too_small(tmp_path):
    src = _write(tmp_path, "a.csv", "t\n0\n1\n")
    assert main(["density", src, "--trait", "t", "--grid", "1",
                 "--out", str(tmp_path / "d.csv")]) == 2


def test_baseline_weights(tmp_path):
    traits = [10] * 10 + [30] * 30
    src = _write(tmp_path, "a.csv", "t\n" + "\n".join(map(str, traits)) + "\n")
    out = str(tmp_path / "b.csv")
    assert main(["baseline", src, "--trait", "t", "--bins", "2", "--out", out]) == 0
    w = [float(r[-1]) for r in _rows(out)[1:]]
    assert w[:10] == [2.0] * 10
    assert all(abs(v - 2 / 3) <= 1e-12 for v in w[10:])


def test_commands_are_deterministic(tmp_path):
    from cwbal import load_schema
    src = load_schema(HEART_SCHEMA).path
    outs = []
    for i in range(2):
        out = str(tmp_path / f"w{i}.csv")
        assert main(["weigh", src, "--config", HEART_SCHEMA, "--out", out]) == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1]


def test_reproduce_cli(tmp_path, capsys):
    out = str(tmp_path / "r")
    assert main(["reproduce", "--config", HEART_CONFIG, "--seeds", "0", "1",
                 "--out", out]) == 0
    lines = open(os.path.join(out, "reports.jsonl")).read().splitlines()
    assert len(lines) == 6
    assert "median AUROC" in capsys.readouterr().out


def test_reproduce_missing_config(tmp_path):
    assert main(["reproduce", "--config", str(tmp_path / "none.json")]) == 2


def test_console_entry_point(tmp_path):
    src = _write(tmp_path, "a.csv", "t\n1\n2\n3\n")
    proc = subprocess.run([sys.executable, "-m", "cwbal.cli", "baseline", src, "--trait", "t",
                           "--out", str(tmp_path / "b.csv")],
                          capture_output=True, text=True, cwd=ROOT)
    assert proc.returncode == 0, proc.stderr
