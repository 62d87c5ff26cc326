from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

GeneratorKind = Literal["sobol", "halton", "mc", "explicit"]
ScrambleKind = Literal["none", "owen_nested", "cp_rotation"]


@dataclass(frozen=True)
class PointMeta:
    generator_kind: str = "explicit"
    scramble_kind: str = "none"
    seed: int = 0
    index_offset: int = 0


@dataclass(frozen=True, eq=False)
class PointSet:
    """An immutable ``M x s`` matrix of points in ``[0, 1)^s`` plus provenance.

    The underlying array is marked read-only so a PointSet can be shared
    between threads without copying.
    """

    points: np.ndarray
    meta: PointMeta = field(default_factory=PointMeta)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"points must be a non-empty M x s matrix, got shape {pts.shape}")
        if not (np.all(pts >= 0.0) and np.all(pts < 1.0)):
            raise ValueError("every coordinate must lie in [0, 1)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n_points


@dataclass(frozen=True)
class NetParams:
    """Parameters of a claimed ``(t, m, s)``-net in base ``b``."""

    t: int
    m: int
    s: int
    b: int = 2

    def __post_init__(self):
        if self.b < 2:
            raise ValueError("base must be >= 2")
        if self.t < 0 or self.m < self.t:
            raise ValueError("need 0 <= t <= m")
        if self.s < 1:
            raise ValueError("dimension must be >= 1")


@dataclass(frozen=True)
class ScrambleSpec:
    kind: ScrambleKind = "owen_nested"
    seed: int = 0
    digit_depth: int = 53


@dataclass(frozen=True)
class DiscrepancyReport:
    value: float
    exact: bool
    boxes_examined: int
