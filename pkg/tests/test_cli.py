import json
import subprocess
import sys

import numpy as np
import pytest

from rqmcf.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from rqmcf.qmc import sobol_points

FAST = ["--sigma", "0.5", "--bandwidth-probes", "10000", "--calibration-probes", "10000"]


def _load(path):
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def test_gen_points_sobol(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["gen-points", "--gen", "sobol", "--m", "5", "--dim", "3", "--out", str(out)]) == EXIT_OK
    assert out.read_text().splitlines()[0] == "x1,x2,x3"
    np.testing.assert_array_equal(_load(out), sobol_points(5, 3).points)


def test_gen_points_to_stdout(capsys):
    assert main(["gen-points", "--gen", "halton", "--count", "3", "--dim", "2"]) == EXIT_OK
    assert capsys.readouterr().out == "x1,x2\n0.5,0.33333333333333331\n0.25,0.66666666666666663\n0.75,0.1111111111111111\n"


@pytest.mark.parametrize("scramble", ["owen", "cp"])
def test_gen_points_scrambled_is_seeded(tmp_path, scramble):
    paths = []
    for seed in (1, 1, 2):
        out = tmp_path / f"{scramble}{len(paths)}.csv"
        main(["gen-points", "--m", "4", "--dim", "2", "--scramble", scramble, "--seed", str(seed), "--out", str(out)])
        paths.append(out.read_bytes())
    assert paths[0] == paths[1] != paths[2]


def test_gen_features(tmp_path):
    out = tmp_path / "f.csv"
    args = ["gen-features", "--sigma", "0.5", "--dim", "2", "--m", "16", "--sampler", "sobol-owen", "--out", str(out)]
    assert main(args) == EXIT_OK
    data = _load(out)
    assert out.read_text().startswith("w1,w2,b\n")
    assert data.shape == (16, 3)
    assert np.all((data[:, 2] >= 0) & (data[:, 2] < 1))


def test_discrepancy_from_file(tmp_path, capsys):
    pts = tmp_path / "p.csv"
    main(["gen-points", "--gen", "sobol", "--m", "1", "--dim", "1", "--out", str(pts)])
    capsys.readouterr()
    assert main(["discrepancy", "--points", str(pts), "--method", "exact"]) == EXIT_OK
    # points {0, 1/2}: sup |#/2 - x| is 1/2
    assert capsys.readouterr().out.splitlines()[1].startswith("0.5,true,")


def test_discrepancy_lower_bound(capsys):
    main(["discrepancy", "--m", "6", "--dim", "3", "--method", "lower-bound", "--probes", "500"])
    value, exact, _ = capsys.readouterr().out.splitlines()[1].split(",")
    assert exact == "false" and 0 < float(value) < 1


def test_krr_fit_exports_coefficients(tmp_path, capsys):
    out = tmp_path / "coef.csv"
    args = ["krr-fit", "--mode", "sobol-cp", "--d", "2", "--n", "128", "--M", "32", "--n-test", "500", "--out", str(out)]
    assert main(args + FAST) == EXIT_OK
    header, values = capsys.readouterr().out.splitlines()
    assert header == "mode,n,M,lambda,sigma,test_mse"
    assert float(values.split(",")[-1]) > 0
    assert _load(out).shape == (32, 4)


def test_krr_fit_from_training_csv(tmp_path, capsys):
    train = tmp_path / "train.csv"
    rng = np.random.default_rng(0)
    X = rng.random((40, 2))
    np.savetxt(train, np.column_stack([X, X.sum(axis=1)]), delimiter=",", header="x1,x2,y", comments="")
    out = tmp_path / "alpha.csv"
    assert main(["krr-fit", "--train", str(train), "--sigma", "0.5", "--lambda", "0.01", "--out", str(out)]) == EXIT_OK
    assert _load(out).shape == (40, 3)


def test_krr_fit_numerical_failure(tmp_path):
    train = tmp_path / "train.csv"
    train.write_text("x1,y\n0.1,1.0\n0.2,nan\n")
    assert main(["krr-fit", "--train", str(train), "--sigma", "0.5", "--lambda", "0.01"]) == EXIT_NUMERIC


@pytest.mark.parametrize(
    "argv",
    [
        ["gen-points", "--gen", "sobol", "--m", "40", "--dim", "2"],
        ["gen-points", "--gen", "sobol", "--dim", "65", "--m", "3"],
        ["gen-points", "--gen", "sobol", "--count", "12"],
        ["gen-features", "--sigma", "0.5", "--dim", "2", "--m", "12", "--sampler", "sobol-owen"],
        ["approx-error", "--m-grid", "16,8"],
        ["approx-error", "--samplers", "lattice"],
        ["krr-bench", "--r", "0.75"],
        ["discrepancy", "--m", "12", "--dim", "8", "--method", "exact"],
        ["approx-error", "--config", "/nonexistent/run.cfg"],
    ],
)
def test_config_errors_exit_2(argv, capsys):
    assert main(argv) == EXIT_CONFIG
    assert "rqmcf: error" in capsys.readouterr().err


def test_approx_error_writes_csv_and_metadata(tmp_path):
    out = tmp_path / "a.csv"
    args = ["approx-error", "--experiment", "approx_det", "--d", "2", "--m-grid", "4:6", "--trials", "3"]
    assert main(args + ["--n-pairs", "50", "--out", str(out)] + FAST) == EXIT_OK
    assert out.read_text().splitlines()[0] == "experiment,sampler,d,M,statistic,value,trials,wall_ms,seed"
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["config"]["experiment"] == "approx_det"
    assert meta["config"]["n_pairs"] == 50


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("experiment = approx_sup_avg\nd = 3\nm_grid = 4:6\ntrials = 2\nn_pairs = 20\nsigma = 0.5\n")
    out = tmp_path / "r.csv"
    assert main(["approx-error", "--config", str(cfg), "--d", "1", "--out", str(out)]) == EXIT_OK
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["config"]["d"] == [1]
    assert meta["config"]["experiment"] == "approx_sup_avg"


def test_dimension_sweep_in_one_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    args = ["approx-error", "--d", "1,3", "--m-grid", "4:6", "--trials", "2", "--n-pairs", "20", "--out", str(out)]
    assert main(args + FAST) == EXIT_OK
    dims = {row.split(",")[2] for row in out.read_text().splitlines()[1:]}
    assert dims == {"1", "3"}
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["config"]["d"] == [1, 3]
    assert set(meta["info"]) == {"d=1", "d=3"}


def test_outputs_identical_across_worker_counts(tmp_path):
    outs = []
    for workers in ("1", "8"):
        out = tmp_path / f"k{workers}.csv"
        args = ["krr-bench", "--d", "2", "--m-grid", "4:5", "--trials", "3", "--n-train", "64", "--n-test", "200"]
        assert main(args + FAST + ["--workers", workers, "--out", str(out)]) == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rqmcf.cli", "gen-points", "--m", "1", "--dim", "1"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout == "x1\n0\n0.5\n"
