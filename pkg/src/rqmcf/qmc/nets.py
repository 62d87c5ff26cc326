"""Elementary-interval balance checks for (t, m, s)- and (lambda, t, m, s)-nets."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..errors import ConfigError
from .pointset import NetParams, PointSet


def compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative ints summing to ``total``."""
    for bars in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


def _digits(points: np.ndarray, b: int, max_k: int) -> list[np.ndarray]:
    # cell index floor(x * b^k) for k = 0..max_k, per dimension
    return [
        np.stack([np.floor(points[:, j] * float(b) ** k).astype(np.int64) for k in range(max_k + 1)])
        for j in range(points.shape[1])
    ]


def _cell_counts(cells: list[np.ndarray], shape: tuple[int, ...], b: int) -> np.ndarray:
    flat = np.zeros_like(cells[0][0])
    for j, k in enumerate(shape):
        flat = flat * b**k + cells[j][k]
    return np.bincount(flat, minlength=b ** sum(shape))


def _interval_counts(points, b, total, s):
    cells = _digits(points, b, total)
    for shape in compositions(total, s):
        yield shape, _cell_counts(cells, shape, b)


def check_net_balance(ps: PointSet, params: NetParams) -> bool:
    """True iff every elementary interval of volume ``b**(t-m)`` holds exactly ``b**t`` points."""
    b, t, m, s = params.b, params.t, params.m, params.s
    if ps.n_points != b**m:
        raise ConfigError(f"a ({t},{m},{s})-net in base {b} has {b**m} points, got {ps.n_points}")
    if ps.dim != s:
        raise ConfigError(f"point set has dimension {ps.dim}, params say {s}")
    return all(np.all(c == b**t) for _, c in _interval_counts(ps.points, b, m - t, s))


def check_lambda_net(ps: PointSet, lam: int, params: NetParams) -> bool:
    """True iff ``ps`` is a ``(lam, t, m, s)``-net in base ``b``.

    Volume ``b**(t-m)`` intervals must hold exactly ``lam * b**t`` points and
    volume ``b**(t-m-1)`` intervals at most ``b**t``.
    """
    b, t, m, s = params.b, params.t, params.m, params.s
    if not 1 <= lam < b:
        raise ConfigError(f"lambda must satisfy 1 <= lambda < {b}")
    if ps.n_points != lam * b**m:
        raise ConfigError(f"expected {lam * b**m} points, got {ps.n_points}")
    if ps.dim != s:
        raise ConfigError(f"point set has dimension {ps.dim}, params say {s}")
    if not all(np.all(c == lam * b**t) for _, c in _interval_counts(ps.points, b, m - t, s)):
        return False
    return all(np.all(c <= b**t) for _, c in _interval_counts(ps.points, b, m - t + 1, s))


def measured_t(ps: PointSet, b: int = 2) -> int:
    """Smallest ``t`` for which ``ps`` (with ``b**m`` points) is a ``(t, m, s)``-net."""
    m = round(np.log(ps.n_points) / np.log(b))
    if b**m != ps.n_points:
        raise ConfigError(f"{ps.n_points} is not a power of {b}")
    for t in range(m + 1):
        if check_net_balance(ps, NetParams(t, m, ps.dim, b)):
            return t
    return m  # unreachable: t = m always holds
