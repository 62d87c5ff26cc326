"""Star discrepancy of point sets in the unit cube."""

from __future__ import annotations

import numpy as np

from .._seeding import rng_from
from ..errors import ConfigError, InstanceTooLargeError
from .pointset import DiscrepancyReport, PointSet

EXACT_WORK_LIMIT = 10**8
_CHUNK_ELEMENTS = 1 << 24


def _critical_grid(col: np.ndarray) -> np.ndarray:
    return np.union1d(col, [1.0])


def _box_counts(x: np.ndarray, anchors_per_dim: list[np.ndarray]):
    """Closed and open counts for every corner of the tensor grid of anchors.

    Returns arrays shaped like the tensor grid.
    """
    M, s = x.shape
    le = [(x[:, j][None, :] <= g[:, None]) for j, g in enumerate(anchors_per_dim)]
    lt = [(x[:, j][None, :] < g[:, None]) for j, g in enumerate(anchors_per_dim)]

    def tensor_count(masks):
        if s == 1:
            return masks[0].sum(axis=1).astype(np.float64)
        acc = masks[0]
        for j in range(1, s - 1):
            acc = (acc[:, None, :] & masks[j][None, :, :]).reshape(-1, M)
        last = masks[-1].astype(np.float64).T
        rows = max(1, _CHUNK_ELEMENTS // max(M, 1))
        out = np.concatenate(
            [acc[i : i + rows].astype(np.float64) @ last for i in range(0, acc.shape[0], rows)]
        )
        return out.reshape([len(g) for g in anchors_per_dim])

    return tensor_count(le), tensor_count(lt)


def _grid_volume(anchors_per_dim):
    vol = np.ones([len(g) for g in anchors_per_dim])
    for j, g in enumerate(anchors_per_dim):
        shape = [1] * len(anchors_per_dim)
        shape[j] = len(g)
        vol = vol * g.reshape(shape)
    return vol


def star_discrepancy_exact(ps: PointSet) -> DiscrepancyReport:
    """Exact star discrepancy by enumeration of the critical grid.

    In each dimension the candidate upper corners are the point coordinates
    and 1.  At every grid node the closed box ``[0, t]`` bounds the excess of
    points over volume and the open box ``[0, t)`` bounds the deficit; the
    supremum over all anchored boxes is attained (as a limit) at one of them.

    Raises
    ------
    InstanceTooLargeError
        If ``M**s * s`` exceeds ``EXACT_WORK_LIMIT``.
    """
    x = ps.points
    M, s = x.shape
    if M**s * s > EXACT_WORK_LIMIT:
        raise InstanceTooLargeError(
            f"exact enumeration needs M^s*s = {M**s * s} > {EXACT_WORK_LIMIT}; "
            "use star_discrepancy_lower_bound"
        )
    grids = [_critical_grid(x[:, j]) for j in range(s)]
    closed, open_ = _box_counts(x, grids)
    vol = _grid_volume(grids)
    value = max(float(np.max(closed / M - vol)), float(np.max(vol - open_ / M)), 0.0)
    return DiscrepancyReport(min(value, 1.0), True, int(vol.size))


def _local_discrepancy(x: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    """max(closed excess, open deficit) at each anchor row, without a tensor grid."""
    M = x.shape[0]
    out = np.empty(anchors.shape[0])
    rows = max(1, _CHUNK_ELEMENTS // max(M * x.shape[1], 1))
    for i in range(0, anchors.shape[0], rows):
        a = anchors[i : i + rows]
        closed = np.all(x[None, :, :] <= a[:, None, :], axis=2).sum(axis=1)
        open_ = np.all(x[None, :, :] < a[:, None, :], axis=2).sum(axis=1)
        vol = np.prod(a, axis=1)
        out[i : i + rows] = np.maximum(closed / M - vol, vol - open_ / M)
    return out


def star_discrepancy_lower_bound(
    ps: PointSet, n_probes: int, seed: int, extra_probes: np.ndarray | None = None
) -> DiscrepancyReport:
    """Lower bound on the star discrepancy from a finite set of anchor boxes.

    Anchors are ``n_probes`` seeded uniform corners, every point of the set
    used as a corner, and any ``extra_probes`` rows supplied by the caller.
    """
    if n_probes < 1:
        raise ConfigError("n_probes must be >= 1")
    x = ps.points
    anchors = [rng_from(seed).random((n_probes, ps.dim)), x]
    if extra_probes is not None:
        extra = np.atleast_2d(np.asarray(extra_probes, dtype=np.float64))
        if extra.shape[1] != ps.dim:
            extra = extra.reshape(-1, ps.dim)
        anchors.append(extra)
    anchors = np.clip(np.concatenate(anchors), 0.0, 1.0)
    local = _local_discrepancy(x, anchors)
    return DiscrepancyReport(float(max(local.max(), 0.0)), False, int(anchors.shape[0]))
