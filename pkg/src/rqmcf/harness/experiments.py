"""Kernel-approximation and KRR benchmark runners.

Every random draw is keyed by ``derive_seed(master_seed, ...)`` on the
identity of what is drawn (pairs, sampler, M, trial index), so output does
not depend on worker count or scheduling.  Trial results are reduced in
trial order.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .._seeding import derive_seed, rng_from
from ..errors import ConfigError
from ..features import QUANTILE_CLAMP, FeatureBank, approx_kernel, gaussian_quantile, make_bank
from ..kernels import KernelSpec, eval_kernel, median_bandwidth
from ..krr import RegressionDataset, fit_exact, fit_features, lambda_schedule, test_mse
from .config import ExperimentConfig
from .report import ResultRecord
from .targets import TargetFunction, calibrate

log = logging.getLogger(__name__)

STATISTIC = {
    "approx_avg": "avg_sq_err",
    "approx_sup_avg": "sup_avg_sq_err",
    "approx_det": "det_sup_sq_err",
}
DETERMINISTIC_SAMPLERS = ("halton",)
CONVERGENCE_BAND = 0.10


@dataclass
class RunResult:
    records: list[ResultRecord]
    flags: list[str] = field(default_factory=list)
    info: dict = field(default_factory=dict)


def fit_loglog_slope(points) -> float:
    """Least-squares slope of ``log2(err)`` against ``log2(M)``."""
    pts = list(points)
    if len(pts) < 3:
        raise ConfigError(f"need at least 3 points to fit a slope, got {len(pts)}")
    M = np.array([p[0] for p in pts], dtype=np.float64)
    err = np.array([p[1] for p in pts], dtype=np.float64)
    if np.any(err <= 0) or np.any(M <= 0):
        raise ValueError("log-log slope needs positive M and error values")
    x = np.log2(M)
    y = np.log2(err)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def resolve_sigma(cfg: ExperimentConfig) -> float:
    if cfg.sigma is not None:
        return float(cfg.sigma)
    return median_bandwidth(cfg.d, cfg.bandwidth_probes, derive_seed(cfg.master_seed, "bandwidth", cfg.d))


def evaluation_pairs(master_seed: int, d: int, n_pairs: int) -> tuple[np.ndarray, np.ndarray]:
    rng = rng_from(derive_seed(master_seed, "pairs", d))
    return rng.random((n_pairs, d)), rng.random((n_pairs, d))


def feature_seed(master_seed: int, sampler: str, M: int, trial: int) -> int:
    return derive_seed(master_seed, "features", sampler, M, trial)


def pair_sq_errors(bank: FeatureBank, X: np.ndarray, Xp: np.ndarray, exact: np.ndarray) -> np.ndarray:
    """``|K_M(x_i, x'_i) - K(x_i, x'_i)|^2`` for each pair."""
    return (approx_kernel(bank, X, Xp) - exact) ** 2


def run_approx_error(cfg: ExperimentConfig) -> RunResult:
    """Kernel approximation error against the number of features.

    approx_avg / approx_sup_avg: per pair, average the squared error over
    ``trials`` independent feature sets, then take the mean / max over pairs.
    approx_det: per feature set, take the max over pairs; report the median
    and quartiles of that max across feature sets.  Halton features are
    deterministic, so they are drawn once.
    """
    cfg = cfg.resolved()
    if cfg.experiment not in STATISTIC:
        raise ConfigError(f"run_approx_error cannot run {cfg.experiment!r}")
    sigma = resolve_sigma(cfg)
    kernel = KernelSpec(cfg.kernel, sigma, cfg.d)
    X, Xp = evaluation_pairs(cfg.master_seed, cfg.d, cfg.n_pairs)
    exact = eval_kernel(kernel, X, Xp)
    stat = STATISTIC[cfg.experiment]

    tasks = []
    for sampler in cfg.samplers:
        n_trials = 1 if sampler in DETERMINISTIC_SAMPLERS else cfg.trials
        for M in cfg.m_grid:
            tasks.extend((sampler, M, r) for r in range(n_trials))

    def work(task):
        sampler, M, r = task
        t0 = time.perf_counter()
        bank = make_bank(sampler, kernel, M, feature_seed(cfg.master_seed, sampler, M, r))
        err = pair_sq_errors(bank, X, Xp, exact)
        if cfg.experiment == "approx_det":
            err = np.array([err.max()])
        return err, time.perf_counter() - t0

    results = _map(work, tasks, cfg.workers)

    grouped: dict[tuple[str, int], list] = {}
    for task, res in zip(tasks, results):
        grouped.setdefault(task[:2], []).append(res)

    records = []
    flags = []
    for sampler in cfg.samplers:
        curve = []
        for M in cfg.m_grid:
            group = grouped[(sampler, M)]
            wall = 1e3 * sum(t for _, t in group) if cfg.timing else None
            n_trials = len(group)
            if cfg.experiment == "approx_det":
                sups = np.array([e[0] for e, _ in group])
                values = {
                    stat: float(np.median(sups)),
                    stat + "_q25": float(np.quantile(sups, 0.25)),
                    stat + "_q75": float(np.quantile(sups, 0.75)),
                }
            else:
                total = np.zeros(cfg.n_pairs)
                for e, _ in group:
                    total += e
                mean_err = total / n_trials
                value = float(mean_err.mean()) if cfg.experiment == "approx_avg" else float(mean_err.max())
                values = {stat: value}
            curve.append((M, values[stat]))
            for name, value in values.items():
                records.append(
                    ResultRecord(cfg.experiment, sampler, cfg.d, M, name, value, n_trials, wall, cfg.master_seed)
                )
        if len(curve) >= 3 and all(v > 0 for _, v in curve):
            slope = fit_loglog_slope(curve)
            n_trials = 1 if sampler in DETERMINISTIC_SAMPLERS else cfg.trials
            records.append(
                ResultRecord(cfg.experiment, sampler, cfg.d, 0, stat + "_slope", slope, n_trials, None, cfg.master_seed)
            )
        else:
            msg = f"{sampler}: slope not fitted ({len(curve)} grid point(s) or nonpositive error)"
            log.warning(msg)
            flags.append(msg)
    return RunResult(records, flags, {"sigma": sigma})


def noise_normals(rng: np.random.Generator, n: int) -> np.ndarray:
    """Standard normal noise via the package's own inverse CDF."""
    u = np.clip(rng.random(n), QUANTILE_CLAMP, 1.0 - QUANTILE_CLAMP)
    return gaussian_quantile(u)


def run_krr_bench(cfg: ExperimentConfig) -> RunResult:
    """Test MSE of exact KRR and feature KRR over repeated training draws.

    One fixed test set with noiseless targets; each trial draws fresh
    training inputs and N(0, 1) label noise, then fits exact KRR (if
    enabled) and every sampler's feature KRR at every M with
    ``lambda = c * n^(-1/(2r+1))``.
    """
    cfg = cfg.resolved()
    if cfg.experiment != "krr_bench":
        raise ConfigError(f"run_krr_bench cannot run {cfg.experiment!r}")
    sigma = resolve_sigma(cfg)
    kernel = KernelSpec("gaussian", sigma, cfg.d)
    target = TargetFunction(cfg.r, cfg.d, sigma)
    scale = calibrate(target, cfg.calibration_probes, derive_seed(cfg.master_seed, "calibration", cfg.d))
    target = TargetFunction(cfg.r, cfg.d, sigma, scale)
    lam = lambda_schedule(cfg.n_train, cfg.r, cfg.lambda_coef)

    X_test = rng_from(derive_seed(cfg.master_seed, "test", cfg.d)).random((cfg.n_test, cfg.d))
    f_test = target(X_test)

    fixed_banks = {
        (s, M): make_bank(s, kernel, M, 0) for s in cfg.samplers if s in DETERMINISTIC_SAMPLERS for M in cfg.m_grid
    }
    keys = ([("exact", 0)] if cfg.include_exact else []) + [(s, M) for s in cfg.samplers for M in cfg.m_grid]

    def work(trial: int):
        rng = rng_from(derive_seed(cfg.master_seed, "train", cfg.d, trial))
        X = rng.random((cfg.n_train, cfg.d))
        y = target(X) + noise_normals(rng, cfg.n_train)
        data = RegressionDataset(X, y)
        out = {}
        for key in keys:
            t0 = time.perf_counter()
            sampler, M = key
            if sampler == "exact":
                model = fit_exact(data, kernel, lam)
            else:
                bank = fixed_banks.get(key) or make_bank(
                    sampler, kernel, M, derive_seed(cfg.master_seed, "krr_features", sampler, M, trial)
                )
                model = fit_features(data, bank, lam)
            out[key] = (test_mse(model, X_test, f_test), time.perf_counter() - t0)
        return out

    per_trial = _map(work, range(cfg.trials), cfg.workers)

    records = []
    means = {}
    for key in keys:
        sampler, M = key
        mse = np.array([t[key][0] for t in per_trial])
        wall = 1e3 * sum(t[key][1] for t in per_trial) if cfg.timing else None
        means[key] = float(mse.mean())
        for name, value in (
            ("test_mse_mean", means[key]),
            ("test_mse_q25", float(np.quantile(mse, 0.25))),
            ("test_mse_q75", float(np.quantile(mse, 0.75))),
        ):
            records.append(ResultRecord("krr_bench", sampler, cfg.d, M, name, value, cfg.trials, wall, cfg.master_seed))

    if cfg.include_exact:
        ref = means[("exact", 0)]
        for sampler in cfg.samplers:
            m_star = float("nan")
            for M in reversed(cfg.m_grid):
                if abs(means[(sampler, M)] - ref) <= CONVERGENCE_BAND * ref:
                    m_star = float(M)
                else:
                    break
            records.append(
                ResultRecord("krr_bench", sampler, cfg.d, 0, "m_star", m_star, cfg.trials, None, cfg.master_seed)
            )
    info = {"sigma": sigma, "lambda": lam, "target_scale": scale, "mse_reference": "noiseless f(X_test)"}
    return RunResult(records, [], info)


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    cfg = cfg.resolved()
    if cfg.experiment == "krr_bench":
        return run_krr_bench(cfg)
    return run_approx_error(cfg)
