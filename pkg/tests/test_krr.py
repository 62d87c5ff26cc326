import math

import numpy as np
import pytest

from rqmcf.errors import ConfigError, NumericalError
from rqmcf.features import FeatureBank, make_bank
from rqmcf.kernels import KernelSpec, eval_kernel, gram_matrix
from rqmcf.krr import (
    RegressionDataset,
    budget_for_lambda,
    feature_budget,
    fit_exact,
    fit_features,
    lambda_schedule,
    predict,
    test_mse,
)

from oracles import explicit_dual_krr

SPEC = KernelSpec("gaussian", 0.5, 2)


def _data(n, d=2, seed=0, noise=0.1):
    rng = np.random.default_rng(seed)
    X = rng.random((n, d))
    return RegressionDataset(X, np.sin(3 * X.sum(axis=1)) + noise * rng.standard_normal(n))


def test_exact_scalar_solve():
    lam, c = 0.3, 2.5
    model = fit_exact(RegressionDataset([[0.4, 0.4]], [c]), SPEC, lam)
    assert model.coef[0] == pytest.approx(c / (1 + lam), rel=1e-15)


def test_exact_heavy_regularization():
    data = _data(20)
    lam = 1e9
    model = fit_exact(data, SPEC, lam)
    assert np.linalg.norm(model.coef) <= np.linalg.norm(data.y) / (data.n * lam) * (1 + 1e-6)


def test_exact_residual():
    data = _data(50, seed=3)
    lam = 1e-3
    model = fit_exact(data, SPEC, lam)
    A = gram_matrix(SPEC, data.X) + data.n * lam * np.eye(data.n)
    assert np.linalg.norm(A @ model.coef - data.y) / np.linalg.norm(data.y) <= 1e-8


def test_features_scalar_solve():
    # one sample, one feature: phi = c, so w = c v / (c^2 + lam)
    w, b = np.array([[0.7]]), np.array([0.05])
    bank = FeatureBank(w, b, KernelSpec("gaussian", 1.0, 1))
    x, v, lam = 0.3, 1.7, 0.2
    c = np.sqrt(2) * np.cos(0.7 * x + 2 * np.pi * 0.05)
    model = fit_features(RegressionDataset([[x]], [v]), bank, lam)
    assert model.coef[0] == pytest.approx(c * v / (c * c + lam), rel=1e-14)


def test_features_zero_labels():
    data = RegressionDataset(np.random.default_rng(1).random((30, 2)), np.zeros(30))
    model = fit_features(data, make_bank("mc", SPEC, 16, 2), 0.01)
    assert np.all(model.coef == 0.0)
    assert np.all(predict(model, np.random.default_rng(2).random((5, 2))) == 0.0)


def test_primal_dual_equivalence():
    rng = np.random.default_rng(11)
    for i in range(40):
        n = int(rng.integers(5, 61))
        M = int(rng.integers(1, 41))
        d = int(rng.integers(1, 4))
        kernel = KernelSpec("gaussian", float(rng.uniform(0.2, 1.5)), d)
        bank = make_bank("mc", kernel, M, i)
        data = _data(n, d, seed=i)
        lam = float(10 ** rng.uniform(-3, 0))
        X_test = rng.random((25, d))
        primal = predict(fit_features(data, bank, lam), X_test)
        dual = predict(fit_exact(data, bank, lam), X_test)
        oracle = explicit_dual_krr(bank, data.X, data.y, lam, X_test)
        scale = np.max(np.abs(oracle)) + 1e-300
        assert np.max(np.abs(primal - oracle)) <= 1e-6 * scale
        assert np.max(np.abs(dual - oracle)) <= 1e-6 * scale


def test_interpolation_limit():
    # well separated inputs and a narrow kernel keep K well conditioned
    X = np.linspace(0.05, 0.95, 10)[:, None]
    spec = KernelSpec("gaussian", 0.05, 1)
    y = np.cos(5 * X[:, 0])
    model = fit_exact(RegressionDataset(X, y), spec, 1e-10)
    oracle = np.linalg.solve(gram_matrix(spec, X), y)
    np.testing.assert_allclose(model.coef, oracle, rtol=1e-6)
    np.testing.assert_allclose(predict(model, X), y, atol=1e-7)


def test_exact_single_term_prediction():
    model = fit_exact(RegressionDataset([[0.2, 0.3]], [1.0]), SPEC, 0.5)
    x = np.array([0.6, 0.1])
    assert predict(model, x)[0] == pytest.approx(model.coef[0] * eval_kernel(SPEC, [0.2, 0.3], x), rel=1e-14)


def test_regularization_monotone_training_error():
    data = _data(60, seed=5, noise=0.3)
    errs = [test_mse(fit_exact(data, SPEC, lam), data.X, data.y) for lam in np.logspace(-4, 1, 12)]
    assert all(b >= a - 1e-15 for a, b in zip(errs, errs[1:]))


def test_mse_examples():
    data = _data(30)
    model = fit_exact(data, SPEC, 0.1)
    pred = predict(model, data.X)
    assert test_mse(model, data.X, pred) == 0.0
    assert test_mse(model, data.X, pred + 0.5) == pytest.approx(0.25, rel=1e-12)
    target = np.random.default_rng(4).random(30)
    assert test_mse(model, data.X, target) == pytest.approx(sum((p - t) ** 2 for p, t in zip(pred, target)) / 30)


def test_factorization_failure_reported():
    bank = make_bank("mc", SPEC, 8, 0)
    data = _data(10)
    with pytest.raises(ConfigError):
        fit_features(data, bank, 0.0)
    with pytest.raises(NumericalError):
        fit_exact(RegressionDataset(np.zeros((3, 2)), [1.0, np.nan, 2.0]), SPEC, 1e-3)


def test_lambda_schedule():
    assert lambda_schedule(1, 1.0) == 0.25
    assert lambda_schedule(16, 0.5) == pytest.approx(0.0625, rel=1e-15)
    assert lambda_schedule(1000, 1.0) == pytest.approx(0.025, rel=1e-12)
    with pytest.raises(ConfigError):
        lambda_schedule(10, 1.5)


def test_feature_budget():
    assert budget_for_lambda(math.exp(-1), 1) == 3
    lam = lambda_schedule(500, 1.0)
    assert feature_budget(500, 1.0, a=0) == math.ceil(1 / lam)
    budgets = [feature_budget(2**k, 0.75, a=2) for k in range(6, 15)]
    assert budgets == sorted(budgets)
    with pytest.raises(ConfigError):
        budget_for_lambda(1.0, 1)


def test_exact_krr_error_decreases_with_n():
    from rqmcf.harness.targets import TargetFunction, calibrated

    sigma = 0.52
    target = calibrated(TargetFunction(1.0, 2, sigma), 10**5, seed=1)
    spec = KernelSpec("gaussian", sigma, 2)
    X_test = np.random.default_rng(0).random((4000, 2))
    f_test = target(X_test)
    means = []
    for n in (256, 512, 1024, 2048):
        errs = []
        for trial in range(20):
            rng = np.random.default_rng([n, trial])
            X = rng.random((n, 2))
            data = RegressionDataset(X, target(X) + rng.standard_normal(n))
            errs.append(test_mse(fit_exact(data, spec, lambda_schedule(n, 1.0)), X_test, f_test))
        means.append(np.mean(errs))
    assert all(b < a for a, b in zip(means, means[1:]))
