"""Synthetic regression targets for the KRR benchmark.

Two smoothness levels are supported for a Gaussian kernel with bandwidth
``sigma`` on ``[0, 1]^d``:

* ``r = 1``: ``f~(x) = int K(x, z) g(z) dz`` with ``g(z) = exp(||z||^2 / (2 sigma^2))``,
  which integrates in closed form to
  ``sigma^(2d) exp(-||x||^2 / (2 sigma^2)) prod_j (exp(x_j / sigma^2) - 1) / x_j``.
* ``r = 0.5``: ``f~(x) = K(1/3 * 1, x) + K(2/3 * 1, x)``.

The regression function is ``f = C * f~`` with ``C`` set so ``E f(X) = 5``
under uniform ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .._seeding import rng_from
from ..errors import ConfigError, NumericalError

TARGET_MEAN = 5.0
DEFAULT_CALIBRATION_PROBES = 10**6


def _rows(X, d):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1) if X.size == d else X.reshape(-1, 1)
    if X.shape[1] != d:
        raise ConfigError(f"expected {d} coordinates, got shape {X.shape}")
    return X


def raw_target_r1(X, sigma: float) -> np.ndarray:
    """Uncalibrated ``r = 1`` target; the removable singularity at ``x_j = 0`` uses its limit."""
    X = np.asarray(X, dtype=np.float64)
    s2 = sigma * sigma
    safe = np.where(X == 0.0, 1.0, X)
    log_factor = np.where(X == 0.0, -np.log(s2), np.log(np.expm1(safe / s2) / safe))
    d = X.shape[1]
    log_f = d * np.log(s2) - np.sum(X * X, axis=1) / (2.0 * s2) + np.sum(log_factor, axis=1)
    return np.exp(log_f)


def raw_target_r05(X, sigma: float) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    inv = 1.0 / (2.0 * sigma * sigma)
    return np.exp(-inv * np.sum((X - 1.0 / 3.0) ** 2, axis=1)) + np.exp(
        -inv * np.sum((X - 2.0 / 3.0) ** 2, axis=1)
    )


@dataclass(frozen=True)
class TargetFunction:
    r: float
    d: int
    sigma: float
    scale: float = 1.0

    def __post_init__(self):
        if self.r not in (0.5, 1.0):
            raise ConfigError(f"targets exist for r in {{0.5, 1}}, got {self.r}")
        if self.d < 1 or not self.sigma > 0:
            raise ConfigError("need d >= 1 and sigma > 0")

    def raw(self, X) -> np.ndarray:
        X = _rows(X, self.d)
        if self.r == 1.0:
            return raw_target_r1(X, self.sigma)
        return raw_target_r05(X, self.sigma)

    def __call__(self, X) -> np.ndarray:
        return self.scale * self.raw(X)


def target_r1(X, spec: TargetFunction) -> np.ndarray:
    return spec.scale * raw_target_r1(_rows(X, spec.d), spec.sigma)


def target_r05(X, spec: TargetFunction) -> np.ndarray:
    return spec.scale * raw_target_r05(_rows(X, spec.d), spec.sigma)


def calibrate(spec: TargetFunction, n_probe: int = DEFAULT_CALIBRATION_PROBES, seed: int = 0, raw=None) -> float:
    """Scale constant making the mean of ``f`` over uniform inputs equal 5.

    ``raw`` substitutes another uncalibrated function (used to check the
    arithmetic on constants).
    """
    if n_probe < 10**4:
        raise ConfigError("calibration needs n_probe >= 10^4")
    fn = spec.raw if raw is None else raw
    rng = rng_from(seed)
    total = 0.0
    chunk = 1 << 18
    for i in range(0, n_probe, chunk):
        k = min(chunk, n_probe - i)
        total += float(np.sum(fn(rng.random((k, spec.d)))))
    mean = total / n_probe
    if not mean > 0:
        raise NumericalError(f"cannot calibrate a target with mean {mean}")
    return TARGET_MEAN / mean


def calibrated(spec: TargetFunction, n_probe: int = DEFAULT_CALIBRATION_PROBES, seed: int = 0) -> TargetFunction:
    return replace(spec, scale=calibrate(spec, n_probe, seed))
