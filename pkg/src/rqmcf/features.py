"""Random Fourier features driven by uniform, low-discrepancy or randomized QMC nodes.

A node ``(t, b)`` in ``[0, 1)^(d+1)`` becomes the feature
``psi(x) = sqrt(2) cos(x . w + 2 pi b)`` with ``w = Q(t) / sigma``, where
``Q`` applies the kernel family's standardized spectral quantile to each
coordinate of ``t``.  Averaging ``psi(x) psi(x')`` over uniformly
distributed nodes recovers ``K(x, x')``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .errors import ConfigError, DimensionError
from .kernels import KernelSpec
from .qmc import PointMeta, PointSet, ScrambleSpec, apply_scramble, halton_points, mc_points, sobol_points

QUANTILE_CLAMP = 2.0**-53
SAMPLERS = ("mc", "halton", "sobol_owen", "sobol_cp", "sobol")

# Acklam's rational approximation to the inverse normal CDF
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_SQRT2 = np.sqrt(2.0)
_SQRT2PI = np.sqrt(2.0 * np.pi)


def _lower_half_quantile(p: np.ndarray) -> np.ndarray:
    """Quantile for ``0 < p <= 0.5``: rational start, then one Halley step."""
    x = np.empty_like(p)
    tail = p < _P_LOW
    if np.any(tail):
        q = np.sqrt(-2.0 * np.log(p[tail]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x[tail] = num / den
    mid = ~tail
    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        x[mid] = num / den
    # lower tail: erfc keeps full relative accuracy of Phi(x) here
    e = 0.5 * erfc(-x / _SQRT2) - p
    u = e * _SQRT2PI * np.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def gaussian_quantile(p):
    """Inverse standard normal CDF.

    Accepts a scalar or an array.  Upper-half probabilities are mapped
    through ``-Q(1 - p)``, which is exact in floating point for
    ``p >= 0.5`` and keeps the refinement step in the well-conditioned tail.

    Raises
    ------
    ValueError
        If any ``p`` is outside the open interval ``(0, 1)``.
    """
    arr = np.asarray(p, dtype=np.float64)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError("gaussian_quantile is defined on the open interval (0, 1)")
    flat = arr.ravel()
    out = np.empty_like(flat)
    upper = flat > 0.5
    if np.any(~upper):
        out[~upper] = _lower_half_quantile(flat[~upper])
    if np.any(upper):
        out[upper] = -_lower_half_quantile(1.0 - flat[upper])
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def normal_cdf(x):
    return 0.5 * erfc(-np.asarray(x, dtype=np.float64) / _SQRT2)


def spectral_quantile(family: str, u: np.ndarray) -> np.ndarray:
    """Standardized per-coordinate quantile of the kernel's spectral measure."""
    if family == "gaussian":
        return gaussian_quantile(u)
    if family == "laplacian":
        return np.tan(np.pi * (u - 0.5))
    if family == "cauchy":
        return np.where(u < 0.5, np.log(2.0 * u), -np.log(2.0 * (1.0 - u)))
    raise ConfigError(f"unknown kernel family {family!r}")


@dataclass(frozen=True, eq=False)
class FeatureBank:
    """Realized frequencies ``w_i`` (M x d) and phases ``b_i`` for one kernel."""

    frequencies: np.ndarray
    phases: np.ndarray
    kernel: KernelSpec
    meta: PointMeta = field(default_factory=PointMeta)

    def __post_init__(self):
        w = np.array(self.frequencies, dtype=np.float64, copy=True)
        b = np.array(self.phases, dtype=np.float64, copy=True).ravel()
        if w.ndim != 2 or w.shape[0] < 1:
            raise DimensionError(f"frequencies must be an M x d matrix, got shape {w.shape}")
        if w.shape[1] != self.kernel.dim:
            raise DimensionError(f"frequencies have {w.shape[1]} columns, kernel dim is {self.kernel.dim}")
        if b.shape != (w.shape[0],):
            raise DimensionError("need exactly one phase per frequency row")
        if not np.all(np.isfinite(w)):
            raise ValueError("frequencies must be finite")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "phases", b)

    @property
    def n_features(self) -> int:
        return self.frequencies.shape[0]


def build_features(ps: PointSet, kernel: KernelSpec) -> FeatureBank:
    """Map nodes in ``[0, 1)^(d+1)`` to a feature bank.

    The first ``d`` columns drive the frequencies, the last column is the
    phase.  Spectral coordinates are clamped to ``[2^-53, 1 - 2^-53]`` so
    nodes on the cube boundary (such as the Sobol' origin) stay finite.
    """
    if ps.dim != kernel.dim + 1:
        raise DimensionError(f"need {kernel.dim + 1} columns for a {kernel.dim}-d kernel, got {ps.dim}")
    t = np.clip(ps.points[:, :-1], QUANTILE_CLAMP, 1.0 - QUANTILE_CLAMP)
    w = spectral_quantile(kernel.family, t) / kernel.sigma
    return FeatureBank(w, ps.points[:, -1], kernel, ps.meta)


def _as_rows(bank: FeatureBank, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    d = bank.kernel.dim
    if X.ndim == 1:
        X = X.reshape(1, -1) if X.size == d else X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[1] != d:
        raise DimensionError(f"expected points with {d} coordinates, got shape {X.shape}")
    return X


def feature_matrix(bank: FeatureBank, X) -> np.ndarray:
    """Rows ``phi_M(x_i)``: ``sqrt(2/M) cos(x_i . w_j + 2 pi b_j)``."""
    X = _as_rows(bank, X)
    arg = X @ bank.frequencies.T + 2.0 * np.pi * bank.phases
    return np.sqrt(2.0 / bank.n_features) * np.cos(arg)


def feature_vector(bank: FeatureBank, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (bank.kernel.dim,):
        raise DimensionError(f"expected a point with {bank.kernel.dim} coordinates, got shape {x.shape}")
    return feature_matrix(bank, x[None, :])[0]


def approx_kernel(bank: FeatureBank, x, x_prime):
    """``phi_M(x) . phi_M(x')``; row-aligned batches give one value per row."""
    scalar = np.ndim(x) <= 1 and np.ndim(x_prime) <= 1
    A = feature_matrix(bank, x)
    B = feature_matrix(bank, x_prime)
    if A.shape[0] != B.shape[0] and 1 not in (A.shape[0], B.shape[0]):
        raise DimensionError("batches of different lengths")
    vals = np.sum(A * B, axis=1)
    return float(vals[0]) if scalar else vals


def sample_nodes(sampler: str, M: int, s: int, seed: int = 0) -> PointSet:
    """``M`` nodes in ``[0, 1)^s`` from a named sampler.

    ``halton`` ignores the seed (deterministic QMC).  Sobol'-based samplers
    need ``M`` to be a power of two.
    """
    if sampler == "mc":
        return mc_points(M, s, seed)
    if sampler == "halton":
        return halton_points(M, s, index_offset=1)
    if sampler in ("sobol", "sobol_owen", "sobol_cp"):
        m = int(M).bit_length() - 1
        if M < 1 or (1 << m) != M:
            raise ConfigError(f"Sobol' samplers need M to be a power of two, got {M}")
        ps = sobol_points(m, s)
        if sampler == "sobol_owen":
            return apply_scramble(ps, ScrambleSpec("owen_nested", seed))
        if sampler == "sobol_cp":
            return apply_scramble(ps, ScrambleSpec("cp_rotation", seed))
        return ps
    raise ConfigError(f"unknown sampler {sampler!r}; choose from {', '.join(SAMPLERS)}")


def make_bank(sampler: str, kernel: KernelSpec, M: int, seed: int = 0) -> FeatureBank:
    return build_features(sample_nodes(sampler, M, kernel.dim + 1, seed), kernel)
