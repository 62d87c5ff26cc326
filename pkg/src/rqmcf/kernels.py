"""Shift-invariant kernels: exact evaluation, Gram matrices, median-heuristic bandwidth.

Bandwidths use the denominator convention, e.g. the Gaussian kernel is
``exp(-||x - x'||^2 / (2 sigma^2))``.  Its spectral measure is therefore
``N(0, sigma^-2 I)``; a caller holding an inverse bandwidth ``s`` (kernel
``exp(-||s (x - x')||^2 / 2)``) should pass ``sigma = 1 / s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._seeding import rng_from
from .errors import ConfigError, DimensionError

Family = Literal["gaussian", "laplacian", "cauchy"]
FAMILIES = ("gaussian", "laplacian", "cauchy")
DEFAULT_BANDWIDTH_PROBES = 10**6


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family, bandwidth ``sigma`` and input dimension ``dim``.

    gaussian:  ``exp(-||x - x'||_2^2 / (2 sigma^2))``
    laplacian: ``exp(-||x - x'||_1 / sigma)``
    cauchy:    ``prod_j 1 / (1 + ((x_j - x'_j) / sigma)^2)``
    """

    family: Family
    sigma: float
    dim: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown kernel family {self.family!r}")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ConfigError(f"sigma must be a positive finite number, got {self.sigma}")
        if self.dim < 1:
            raise ConfigError(f"dim must be >= 1, got {self.dim}")


def _as_rows(X, dim: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1) if X.size == dim else X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[1] != dim:
        raise DimensionError(f"expected points with {dim} coordinates, got shape {X.shape}")
    return X


def _profile(spec: KernelSpec, diff: np.ndarray) -> np.ndarray:
    """Kernel value as a function of the difference vectors (last axis = coordinates)."""
    z = diff / spec.sigma
    if spec.family == "gaussian":
        return np.exp(-0.5 * np.sum(z * z, axis=-1))
    if spec.family == "laplacian":
        return np.exp(-np.sum(np.abs(z), axis=-1))
    return np.prod(1.0 / (1.0 + z * z), axis=-1)


def eval_kernel(spec: KernelSpec, x, x_prime) -> float | np.ndarray:
    """Exact kernel value(s).

    ``x`` and ``x_prime`` are single points or row-aligned batches of points.
    """
    scalar = np.ndim(x) <= 1 and np.ndim(x_prime) <= 1
    a = _as_rows(x, spec.dim)
    b = _as_rows(x_prime, spec.dim)
    if a.shape[0] != b.shape[0] and 1 not in (a.shape[0], b.shape[0]):
        raise DimensionError("batches of different lengths")
    out = _profile(spec, a - b)
    return float(out[0]) if scalar else out


def cross_gram(spec: KernelSpec, X, Z) -> np.ndarray:
    """Matrix ``[K(x_i, z_j)]``."""
    X = _as_rows(X, spec.dim)
    Z = _as_rows(Z, spec.dim)
    if spec.family == "gaussian":
        sq = (
            np.sum(X * X, axis=1)[:, None]
            + np.sum(Z * Z, axis=1)[None, :]
            - 2.0 * (X @ Z.T)
        )
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-sq / (2.0 * spec.sigma**2))
    return _profile(spec, X[:, None, :] - Z[None, :, :])


def gram_matrix(spec: KernelSpec, X) -> np.ndarray:
    """Symmetric Gram matrix with exact unit diagonal."""
    K = cross_gram(spec, X, X)
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 1.0)
    return K


def median_bandwidth(d: int, n_probe: int = DEFAULT_BANDWIDTH_PROBES, seed: int = 0) -> float:
    """Median of ``||X - X'||`` for ``X, X'`` iid uniform on ``[0, 1]^d``.

    Estimated from ``n_probe`` seeded pairs; the same arguments always give
    the same float.
    """
    if n_probe < 2:
        raise ConfigError("n_probe must be >= 2")
    if d < 1:
        raise ConfigError("d must be >= 1")
    rng = rng_from(seed)
    dist = np.empty(n_probe)
    chunk = max(1, (1 << 22) // d)
    for i in range(0, n_probe, chunk):
        k = min(chunk, n_probe - i)
        diff = rng.random((k, d)) - rng.random((k, d))
        dist[i : i + k] = np.sqrt(np.sum(diff * diff, axis=1))
    return float(np.median(dist))
