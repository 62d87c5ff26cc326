"""Deterministic low-discrepancy generators and the plain Monte Carlo sampler."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .._seeding import rng_from
from ..errors import ConfigError, DimensionError
from ._joe_kuo import JOE_KUO, MAX_DIM as SOBOL_MAX_DIM
from .pointset import PointMeta, PointSet

SOBOL_BITS = 32
MAX_SOBOL_INDEX = 1 << 31

# fmt: off
PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
    59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311,
)
# fmt: on
HALTON_MAX_DIM = len(PRIMES)


@lru_cache(maxsize=None)
def _direction_integers(s: int) -> np.ndarray:
    """Return an ``s x SOBOL_BITS`` uint64 array; column k is the generator-matrix
    column for bit k of the index, left-aligned to SOBOL_BITS bits."""
    v = np.zeros((s, SOBOL_BITS), dtype=np.uint64)
    for k in range(SOBOL_BITS):
        v[0, k] = 1 << (SOBOL_BITS - 1 - k)
    for j in range(1, s):
        _, deg, a, m_init = JOE_KUO[j - 1]
        m = list(m_init)
        for k in range(deg, SOBOL_BITS):
            new = m[k - deg] ^ (m[k - deg] << deg)
            for i in range(1, deg):
                if (a >> (deg - 1 - i)) & 1:
                    new ^= m[k - i] << i
            m.append(new)
        for k in range(SOBOL_BITS):
            v[j, k] = m[k] << (SOBOL_BITS - 1 - k)
    v.setflags(write=False)
    return v


def sobol_integers(indices: np.ndarray, s: int) -> np.ndarray:
    """Sobol' points for arbitrary indices as SOBOL_BITS-bit integers (natural order)."""
    if s < 1 or s > SOBOL_MAX_DIM:
        raise DimensionError(f"Sobol' generator supports 1..{SOBOL_MAX_DIM} dimensions, got {s}")
    v = _direction_integers(s)
    idx = np.asarray(indices, dtype=np.uint64)
    out = np.zeros((idx.size, s), dtype=np.uint64)
    nbits = int(idx.max()).bit_length() if idx.size else 0
    for k in range(nbits):
        on = ((idx >> np.uint64(k)) & np.uint64(1)).astype(bool)
        out[on] ^= v[:, k]
    return out


def sobol_points(m: int, s: int, index_offset: int = 0) -> PointSet:
    """The ``2**m`` consecutive Sobol' points starting at ``index_offset``.

    Points come out in natural index order, so with ``index_offset=0`` the
    first ``2**k`` rows form a net for every ``k <= m``.  Index 0 is the
    origin.
    """
    if m < 0 or m > 31:
        raise ConfigError(f"m must be in [0, 31], got {m}")
    if index_offset < 0 or index_offset + (1 << m) > MAX_SOBOL_INDEX:
        raise ConfigError("index range exceeds 2^31")
    idx = np.arange(index_offset, index_offset + (1 << m), dtype=np.uint64)
    ints = sobol_integers(idx, s)
    pts = ints.astype(np.float64) / float(1 << SOBOL_BITS)
    return PointSet(pts, PointMeta("sobol", "none", 0, index_offset))


def radical_inverse(n: np.ndarray, base: int) -> np.ndarray:
    """Van der Corput radical inverse of nonnegative integers ``n`` in ``base``.

    Computed as one integer ratio ``r / base**K`` so each value is the
    correctly rounded double of the exact rational.
    """
    n = np.asarray(n, dtype=np.int64)
    if n.size == 0:
        return np.zeros(0)
    n_max = int(n.max())
    n_digits = 1
    while base**n_digits <= n_max:
        n_digits += 1
    rev = np.zeros_like(n)
    rem = n.copy()
    for _ in range(n_digits):
        rev = rev * base + rem % base
        rem //= base
    return rev / float(base**n_digits)


def halton_points(M: int, s: int, index_offset: int = 1) -> PointSet:
    """Rows are radical inverses of ``index_offset + n`` in the first ``s`` primes.

    The default offset of 1 skips the all-zero point at index 0.
    """
    if s < 1 or s > HALTON_MAX_DIM:
        raise DimensionError(f"Halton generator supports 1..{HALTON_MAX_DIM} dimensions, got {s}")
    if M < 1:
        raise ConfigError("M must be >= 1")
    if index_offset < 0:
        raise ConfigError("index_offset must be >= 0")
    n = np.arange(index_offset, index_offset + M, dtype=np.int64)
    pts = np.column_stack([radical_inverse(n, PRIMES[j]) for j in range(s)])
    return PointSet(pts, PointMeta("halton", "none", 0, index_offset))


def mc_points(M: int, s: int, seed: int) -> PointSet:
    """IID uniform points from the seeded PCG64 stream."""
    if M < 1 or s < 1:
        raise ConfigError("M and s must be >= 1")
    pts = rng_from(seed).random((M, s))
    return PointSet(pts, PointMeta("mc", "none", seed, 0))
