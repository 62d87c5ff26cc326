"""Counter-based seed derivation and the 64-bit mixer behind lazy scrambling.

Everything random in the package is a pure function of a 64-bit seed, so
trials can be dispatched in any order (or on any number of threads) and
still reproduce bit for bit.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized SplitMix64 finalizer; ``z`` must be uint64 (wraps mod 2^64)."""
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_seed(master: int, *keys: int | str) -> int:
    """Derive a child seed from ``master`` and a path of integer/string keys.

    The result depends only on the arguments, never on call order.
    """
    h = mix64(int(master) ^ _GOLDEN)
    for key in keys:
        if isinstance(key, str):
            k = 0
            for ch in key.encode():
                k = mix64(k ^ ch)
        else:
            k = int(key) & MASK64
        h = mix64((h + _GOLDEN + mix64(k)) & MASK64)
    return h


def rng_from(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))
