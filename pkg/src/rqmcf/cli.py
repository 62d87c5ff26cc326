"""Command line entry point: ``rqmcf <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._seeding import derive_seed, rng_from
from .errors import NumericalError, RqmcfError
from .features import make_bank
from .harness.config import DEFAULT_D_GRID, build_config, coerce, read_config_file
from .harness.experiments import noise_normals, run_experiment
from .harness.report import write_csv, write_metadata
from .harness.targets import TargetFunction, calibrate
from .kernels import FAMILIES, KernelSpec, median_bandwidth
from .krr import RegressionDataset, fit_exact, fit_features, lambda_schedule, test_mse
from .qmc import (
    PointSet,
    ScrambleSpec,
    apply_scramble,
    halton_points,
    mc_points,
    sobol_points,
    star_discrepancy_exact,
    star_discrepancy_lower_bound,
)
from .qmc.discrepancy import EXACT_WORK_LIMIT

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
SCRAMBLES = {"none": "none", "owen": "owen_nested", "cp": "cp_rotation"}

log = logging.getLogger("rqmcf")


def _write_matrix(rows: np.ndarray, header: list[str], out: str | None):
    lines = [",".join(header)]
    lines += [",".join(f"{v:.17g}" for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _read_matrix(path: str) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def _point_args(p: argparse.ArgumentParser):
    p.add_argument("--gen", choices=("sobol", "halton", "mc"), default="sobol")
    p.add_argument("--m", type=int, help="log2 of the number of Sobol' points")
    p.add_argument("--count", type=int, help="number of points (halton/mc; power of two for sobol)")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--scramble", choices=tuple(SCRAMBLES), default="none")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--offset", type=int, help="starting index (default 0 for sobol, 1 for halton)")


def _generate_points(args) -> PointSet:
    if args.gen == "sobol":
        if args.m is None:
            if args.count is None or args.count < 1 or args.count & (args.count - 1):
                raise RqmcfError("sobol needs --m, or --count equal to a power of two")
            m = args.count.bit_length() - 1
        else:
            m = args.m
        ps = sobol_points(m, args.dim, args.offset or 0)
    else:
        count = args.count if args.count is not None else (2**args.m if args.m is not None else None)
        if count is None:
            raise RqmcfError(f"{args.gen} needs --count")
        if args.gen == "halton":
            ps = halton_points(count, args.dim, 1 if args.offset is None else args.offset)
        else:
            ps = mc_points(count, args.dim, args.seed)
    return apply_scramble(ps, ScrambleSpec(SCRAMBLES[args.scramble], args.seed))


def cmd_gen_points(args) -> int:
    ps = _generate_points(args)
    _write_matrix(ps.points, [f"x{j + 1}" for j in range(ps.dim)], args.out)
    return EXIT_OK


def cmd_gen_features(args) -> int:
    kernel = KernelSpec(args.kernel, args.sigma, args.dim)
    bank = make_bank(args.sampler.replace("-", "_"), kernel, args.m, args.seed)
    rows = np.column_stack([bank.frequencies, bank.phases])
    _write_matrix(rows, [f"w{j + 1}" for j in range(args.dim)] + ["b"], args.out)
    return EXIT_OK


def cmd_discrepancy(args) -> int:
    if args.points:
        _, data = _read_matrix(args.points)
        ps = PointSet(data)
    else:
        ps = _generate_points(args)
    method = args.method
    if method == "auto":
        method = "exact" if ps.n_points**ps.dim * ps.dim <= EXACT_WORK_LIMIT else "lower-bound"
    if method == "exact":
        rep = star_discrepancy_exact(ps)
    else:
        rep = star_discrepancy_lower_bound(ps, args.probes, args.seed)
    text = f"value,exact,boxes_examined\n{rep.value!r},{str(rep.exact).lower()},{rep.boxes_examined}\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_krr_fit(args) -> int:
    mode = args.mode.replace("-", "_")
    if args.train:
        header, data = _read_matrix(args.train)
        X, y = data[:, :-1], data[:, -1]
        d = X.shape[1]
        target = None
        seed = args.seed
    else:
        d, seed = args.d, args.seed
        X = rng_from(derive_seed(seed, "krr-fit", "train")).random((args.n, d))
    sigma = args.sigma if args.sigma else median_bandwidth(d, args.bandwidth_probes, derive_seed(seed, "bandwidth", d))
    kernel = KernelSpec("gaussian", sigma, d)
    if not args.train:
        target = TargetFunction(args.r, d, sigma)
        target = TargetFunction(args.r, d, sigma, calibrate(target, args.calibration_probes, derive_seed(seed, "calibration", d)))
        rng = rng_from(derive_seed(seed, "krr-fit", "noise"))
        y = target(X) + noise_normals(rng, len(X))
    data = RegressionDataset(X, y)
    lam = args.lam if args.lam is not None else lambda_schedule(data.n, args.r, 0.25)
    if mode == "exact":
        model = fit_exact(data, kernel, lam)
        rows = np.column_stack([X, model.coef])
        header = [f"x{j + 1}" for j in range(d)] + ["alpha"]
    else:
        bank = make_bank(mode, kernel, args.M, derive_seed(seed, "krr-fit", "features"))
        model = fit_features(data, bank, lam)
        rows = np.column_stack([bank.frequencies, bank.phases, model.coef])
        header = [f"w{j + 1}" for j in range(d)] + ["b", "coef"]
    if args.out:
        _write_matrix(rows, header, args.out)
    summary = {"mode": mode, "n": data.n, "M": 0 if mode == "exact" else args.M, "lambda": lam, "sigma": sigma}
    if target is not None and args.n_test > 0:
        X_test = rng_from(derive_seed(seed, "krr-fit", "test")).random((args.n_test, d))
        summary["test_mse"] = test_mse(model, X_test, target(X_test))
    sys.stdout.write(",".join(summary) + "\n" + ",".join(repr(v) if isinstance(v, float) else str(v) for v in summary.values()) + "\n")
    return EXIT_OK


def _experiment_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--d", help="dimension, or a comma list swept into one CSV (default 1,2,5,10,20)")
    p.add_argument("--kernel", choices=FAMILIES)
    p.add_argument("--samplers", help="comma list of mc,halton,sobol_owen,sobol_cp")
    p.add_argument("--m-grid", help="comma list of M values, or lo:hi for 2^lo..2^hi")
    p.add_argument("--n-pairs", type=int)
    p.add_argument("--n-train", type=int)
    p.add_argument("--n-test", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--seed", type=int, dest="master_seed")
    p.add_argument("--sigma", type=float)
    p.add_argument("--bandwidth-probes", type=int)
    p.add_argument("--calibration-probes", type=int)
    p.add_argument("--lambda-coef", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--timing", action="store_true", default=None, help="record wall_ms in the CSV")
    p.add_argument("--no-exact", dest="include_exact", action="store_false", default=None)
    p.add_argument("--out", dest="output")


_TEXT_KEYS = ("d", "samplers", "m_grid")


def _run_benchmark(args, experiment: str | None) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    overrides = {}
    for key in (
        "d", "kernel", "samplers", "m_grid", "n_pairs", "n_train", "n_test", "trials", "r",
        "master_seed", "sigma", "bandwidth_probes", "calibration_probes", "lambda_coef",
        "workers", "timing", "include_exact", "output",
    ):
        value = getattr(args, key, None)
        if value is None:
            continue
        if key in _TEXT_KEYS:
            key, value = coerce(key, value)
        overrides[key] = value
    if experiment is not None:
        overrides["experiment"] = experiment
    elif "experiment" not in file_values:
        overrides["experiment"] = "approx_avg"
    dims = overrides.pop("d", file_values.pop("d", DEFAULT_D_GRID))
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    if not dims:
        raise RqmcfError("no dimension given")
    records, flags, info = [], [], {}
    for d in dims:
        cfg = build_config(file_values, dict(overrides, d=d))
        result = run_experiment(cfg)
        records += result.records
        flags += [f"d={d}: {f}" for f in result.flags]
        info[f"d={d}"] = result.info
    config = dict(cfg.as_dict(), d=list(dims))
    path = write_csv(records, cfg.output)
    write_metadata(path, config, {"flags": flags, "info": info})
    log.info("wrote %s (%d records)", path, len(records))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rqmcf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rqmcf {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-points", help="write a (randomized) point set as CSV")
    _point_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_points)

    p = sub.add_parser("gen-features", help="write a feature bank (w1..wd,b) as CSV")
    p.add_argument("--kernel", choices=FAMILIES, default="gaussian")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--m", type=int, required=True, help="number of features M")
    p.add_argument("--sampler", choices=("mc", "halton", "sobol-owen", "sobol-cp"), default="sobol-owen")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_features)

    p = sub.add_parser("discrepancy", help="star discrepancy of a point set")
    p.add_argument("--points", help="CSV written by gen-points; otherwise generate with the flags below")
    _point_args(p)
    p.add_argument("--method", choices=("auto", "exact", "lower-bound"), default="auto")
    p.add_argument("--probes", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser("krr-fit", help="fit one KRR model and export its coefficients")
    p.add_argument("--mode", choices=("exact", "mc", "halton", "sobol-owen", "sobol-cp"), default="exact")
    p.add_argument("--train", help="CSV with columns x1..xd,y; otherwise synthetic data")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--M", type=int, default=64)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-test", type=int, default=10_000)
    p.add_argument("--bandwidth-probes", type=int, default=10**6)
    p.add_argument("--calibration-probes", type=int, default=10**6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_krr_fit)

    p = sub.add_parser("approx-error", help="kernel approximation error benchmark")
    p.add_argument("--experiment", choices=("approx_avg", "approx_sup_avg", "approx_det"), default=None)
    _experiment_args(p)
    p.set_defaults(func=lambda a: _run_benchmark(a, a.experiment))

    p = sub.add_parser("krr-bench", help="kernel ridge regression benchmark")
    _experiment_args(p)
    p.set_defaults(func=lambda a: _run_benchmark(a, "krr_bench"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"rqmcf: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (RqmcfError, ValueError, OSError) as exc:
        print(f"rqmcf: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
