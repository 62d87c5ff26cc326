"""Randomizations of base-2 point sets.

The nested uniform scramble never materializes Owen's permutation tree.
The flip applied to digit ``k`` of coordinate ``j`` is one bit of a 64-bit
hash of ``(seed, j, k, first k-1 input digits)``, which is exactly a
random binary permutation at that node of the tree, drawn independently of
every other node.
"""

from __future__ import annotations

import numpy as np

from .._seeding import MASK64, mix64, mix64_array, rng_from
from ..errors import ConfigError
from .pointset import PointMeta, PointSet, ScrambleSpec

MANTISSA_BITS = 53
_TWO53 = float(1 << MANTISSA_BITS)
_SHIFT_BITS = 52


def to_fixed53(points: np.ndarray) -> np.ndarray:
    """Leading 53 binary digits of each coordinate as uint64 integers."""
    return np.floor(np.asarray(points, dtype=np.float64) * _TWO53).astype(np.uint64)


def _node_keys(seed: int, s: int, depth: int) -> np.ndarray:
    keys = np.empty((depth, s), dtype=np.uint64)
    base = mix64(seed ^ 0x6A09E667F3BCC909)
    for j in range(s):
        kj = mix64((base + (j + 1) * 0x9E3779B97F4A7C15) & MASK64)
        for k in range(depth):
            keys[k, j] = mix64((kj ^ ((k + 1) * 0xD1B54A32D192ED03)) & MASK64)
    return keys


def owen_scramble_fixed(x: np.ndarray, seed: int, digit_depth: int = MANTISSA_BITS) -> np.ndarray:
    """Nested uniform scramble of 53-bit fixed-point coordinates ``x`` (uint64, M x s).

    Digits below ``digit_depth`` are passed through unchanged.
    """
    if not 1 <= digit_depth <= MANTISSA_BITS:
        raise ConfigError(f"digit_depth must be in [1, {MANTISSA_BITS}], got {digit_depth}")
    x = np.asarray(x, dtype=np.uint64)
    keys = _node_keys(seed, x.shape[1], digit_depth)
    out = x.copy()
    one = np.uint64(1)
    for k in range(digit_depth):
        # digit k+1 sits at bit position 52-k; its prefix is everything above it
        pos = np.uint64(MANTISSA_BITS - 1 - k)
        prefix = x >> (pos + one)
        h = mix64_array(keys[k] ^ (prefix * np.uint64(0x9E3779B97F4A7C15) + np.uint64(k)))
        out ^= (h >> np.uint64(63)) << pos
    return out


def owen_scramble(ps: PointSet, spec: ScrambleSpec) -> PointSet:
    """Apply a nested uniform (Owen) scramble in base 2.

    ``spec.kind == "none"`` returns ``ps`` itself.
    """
    if spec.kind == "none":
        return ps
    if spec.kind != "owen_nested":
        raise ConfigError(f"owen_scramble needs kind 'owen_nested', got {spec.kind!r}")
    if not 1 <= spec.digit_depth <= MANTISSA_BITS:
        raise ConfigError(f"digit_depth must be in [1, {MANTISSA_BITS}], got {spec.digit_depth}")
    y = owen_scramble_fixed(to_fixed53(ps.points), spec.seed, spec.digit_depth)
    meta = PointMeta(ps.meta.generator_kind, "owen_nested", spec.seed, ps.meta.index_offset)
    return PointSet(y.astype(np.float64) / _TWO53, meta)


def rotation_shift(seed: int, s: int) -> np.ndarray:
    """Per-dimension uniform shift on the 2^-52 grid.

    The grid keeps ``x + U`` exact for inputs with at most 52 fractional
    bits, so rotated Sobol' columns keep their circular differences exactly.
    """
    k = rng_from(seed).integers(0, 1 << _SHIFT_BITS, size=s, dtype=np.uint64)
    return k.astype(np.float64) / float(1 << _SHIFT_BITS)


def cp_rotate(ps: PointSet, seed: int, shift: np.ndarray | None = None) -> PointSet:
    """Cranley-Patterson rotation ``frac(x + U)``.

    ``shift`` overrides the seeded draw of ``U``.
    """
    u = rotation_shift(seed, ps.dim) if shift is None else np.asarray(shift, dtype=np.float64)
    if u.shape != (ps.dim,):
        raise ConfigError(f"shift must have length {ps.dim}")
    y = ps.points + u
    y = np.where(y >= 1.0, y - 1.0, y)
    meta = PointMeta(ps.meta.generator_kind, "cp_rotation", seed, ps.meta.index_offset)
    return PointSet(y, meta)


def apply_scramble(ps: PointSet, spec: ScrambleSpec) -> PointSet:
    if spec.kind == "none":
        return ps
    if spec.kind == "owen_nested":
        return owen_scramble(ps, spec)
    if spec.kind == "cp_rotation":
        return cp_rotate(ps, spec.seed)
    raise ConfigError(f"unknown scramble kind {spec.kind!r}")
