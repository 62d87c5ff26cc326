"""Kernel ridge regression: exact (dual) and random-feature (primal) solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import ConfigError, DimensionError, NumericalError
from .features import FeatureBank, feature_matrix
from .kernels import KernelSpec, cross_gram, gram_matrix

RESIDUAL_TOL = 1e-8
_PREDICT_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class RegressionDataset:
    X: np.ndarray
    y: np.ndarray
    truth: np.ndarray | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.y, dtype=np.float64).ravel()
        if X.shape[0] != y.shape[0]:
            raise DimensionError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if self.truth is not None:
            f = np.asarray(self.truth, dtype=np.float64).ravel()
            if f.shape != y.shape:
                raise DimensionError("truth must have one entry per row")
            object.__setattr__(self, "truth", f)

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True, eq=False)
class KrrModel:
    """A fitted estimator.

    ``mode == "exact"``: ``coef`` holds the dual coefficients and ``X_train``
    the training inputs; ``kernel`` is either the exact kernel or a feature
    bank whose approximate kernel plays its role.
    ``mode == "features"``: ``coef`` holds the primal weights over ``bank``.
    """

    mode: Literal["exact", "features"]
    coef: np.ndarray
    lam: float
    kernel: KernelSpec | FeatureBank
    X_train: np.ndarray | None = None
    residual: float = 0.0

    @property
    def bank(self) -> FeatureBank:
        if not isinstance(self.kernel, FeatureBank):
            raise AttributeError("model has no feature bank")
        return self.kernel


def _spd_solve(A: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, float]:
    """Cholesky solve with one step of iterative refinement; returns (x, relative residual)."""
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(rhs))):
        raise NumericalError("system contains non-finite entries")
    try:
        factor = cho_factor(A, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise NumericalError(f"Cholesky factorization failed: {exc}") from exc
    x = cho_solve(factor, rhs, check_finite=False)
    x = x + cho_solve(factor, rhs - A @ x, check_finite=False)
    norm = np.linalg.norm(rhs)
    res = 0.0 if norm == 0.0 else float(np.linalg.norm(A @ x - rhs) / norm)
    if not np.isfinite(res) or res > RESIDUAL_TOL:
        raise NumericalError(f"relative residual {res:.3e} exceeds {RESIDUAL_TOL:g}")
    return x, res


def _check_lambda(lam: float):
    if not (np.isfinite(lam) and lam > 0):
        raise ConfigError(f"lambda must be positive, got {lam}")


def _train_gram(kernel, X):
    if isinstance(kernel, FeatureBank):
        Phi = feature_matrix(kernel, X)
        return Phi @ Phi.T
    return gram_matrix(kernel, X)


def _cross(kernel, X, Z):
    if isinstance(kernel, FeatureBank):
        return feature_matrix(kernel, X) @ feature_matrix(kernel, Z).T
    return cross_gram(kernel, X, Z)


def fit_exact(data: RegressionDataset, kernel: KernelSpec | FeatureBank, lam: float) -> KrrModel:
    """Dual KRR: solve ``(K + n lam I) alpha = y``.

    Passing a FeatureBank as ``kernel`` uses the approximate kernel
    ``K_M(x, x') = phi_M(x) . phi_M(x')`` in place of ``K``.
    """
    _check_lambda(lam)
    n = data.n
    A = _train_gram(kernel, data.X)
    A[np.diag_indices(n)] += n * lam
    alpha, res = _spd_solve(A, data.y)
    return KrrModel("exact", alpha, lam, kernel, data.X, res)


def fit_features(data: RegressionDataset, bank: FeatureBank, lam: float) -> KrrModel:
    """Primal random-feature KRR: solve ``(Phi^T Phi + n lam I) w = Phi^T y``.

    Costs ``O(n M^2 + M^3)``.
    """
    _check_lambda(lam)
    n = data.n
    Phi = feature_matrix(bank, data.X)
    A = Phi.T @ Phi
    A[np.diag_indices(bank.n_features)] += n * lam
    w, res = _spd_solve(A, Phi.T @ data.y)
    return KrrModel("features", w, lam, bank, None, res)


def predict(model: KrrModel, X_test) -> np.ndarray:
    X_test = np.asarray(X_test, dtype=np.float64)
    d = model.kernel.kernel.dim if isinstance(model.kernel, FeatureBank) else model.kernel.dim
    if X_test.ndim == 1:
        X_test = X_test.reshape(1, -1) if X_test.size == d else X_test.reshape(-1, 1)
    if X_test.ndim != 2 or X_test.shape[1] != d:
        raise DimensionError(f"expected test points with {d} coordinates, got shape {X_test.shape}")
    out = np.empty(X_test.shape[0])
    for i in range(0, X_test.shape[0], _PREDICT_CHUNK):
        block = X_test[i : i + _PREDICT_CHUNK]
        if model.mode == "features":
            out[i : i + len(block)] = feature_matrix(model.bank, block) @ model.coef
        else:
            out[i : i + len(block)] = _cross(model.kernel, block, model.X_train) @ model.coef
    return out


def test_mse(model: KrrModel, X_test, target) -> float:
    """Mean squared difference between predictions at ``X_test`` and ``target``."""
    target = np.asarray(target, dtype=np.float64).ravel()
    pred = predict(model, X_test)
    if pred.shape != target.shape:
        raise DimensionError("target must have one entry per test row")
    return float(np.mean((pred - target) ** 2))


test_mse.__test__ = False  # keep pytest from collecting it when imported into tests


def lambda_schedule(n: int, r: float, c: float = 0.25) -> float:
    """Regularization ``c * n**(-1 / (2r + 1))`` for smoothness ``r`` in ``[0.5, 1]``."""
    if not 0.5 <= r <= 1.0:
        raise ConfigError(f"smoothness r must be in [0.5, 1], got {r}")
    if n < 1:
        raise ConfigError("n must be >= 1")
    return c * n ** (-1.0 / (2.0 * r + 1.0))


def budget_for_lambda(lam: float, a: float) -> int:
    """``ceil(log(1/lam)**a / lam)``."""
    if not 0 < lam < 1:
        raise ConfigError(f"feature budget needs 0 < lambda < 1, got {lam}")
    return math.ceil(math.log(1.0 / lam) ** a / lam)


def feature_budget(n: int, r: float, a: float = 1.0, c: float = 0.25) -> int:
    """Number of features ``log^a(1/lam) / lam`` at the scheduled ``lam``."""
    return budget_for_lambda(lambda_schedule(n, r, c), a)
