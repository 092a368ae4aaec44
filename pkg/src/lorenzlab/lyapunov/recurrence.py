from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from pydantic import Field

from lorenzlab.attractor.geometry import GeometryReport
from lorenzlab.attractor.levels import LevelStructure
from lorenzlab.errors import CollisionAbort
from lorenzlab.maps.base import LorenzMap
from lorenzlab.schemas.common import FrozenModel


class RecurrenceProfile(FrozenModel):
    """values[i][j] = (1/n_j) Σ_{i<n_j, f^i(x) ∈ C_δi} log d(f^i(x), c)."""

    start: str
    x: float
    deltas: list[float]
    ns: list[int]
    values: list[list[float]]
    bounds: list[float | None] = Field(default_factory=list)
    collision_index: int | None = None

    @property
    def truncated(self) -> bool:
        return self.collision_index is not None

    def envelope(self) -> list[float]:
        """Largest |value| over the n-grid for every δ."""
        return [max((abs(value) for value in row), default=0.0) for row in self.values]

    def rows(self) -> list[tuple[float, int, float, float | None]]:
        bounds = self.bounds or [None] * len(self.deltas)
        return [
            (delta, n, value, bound)
            for delta, row, bound in zip(self.deltas, self.values, bounds)
            for n, value in zip(self.ns, row)
        ]


class VisitAudit(FrozenModel):
    k: int = Field(ge=1)
    n: int = Field(ge=0)
    count: int = Field(ge=0)
    bound: float

    @property
    def ok(self) -> bool:
        return self.count <= self.bound


def _orbit_points(lmap: LorenzMap, x: float, n: int) -> tuple[np.ndarray, int | None]:
    orbit = lmap.orbit(x, n)
    if orbit.collision_index is not None:
        return orbit.points[: orbit.collision_index], orbit.collision_index
    return orbit.points[:n], None


def _log_distances(lmap: LorenzMap, points: np.ndarray, delta: float) -> np.ndarray:
    distance = np.abs(points - lmap.singular_point)
    inside = (distance < delta) & (distance > 0.0)
    terms = np.zeros_like(distance)
    terms[inside] = np.log(distance[inside])
    return terms


def slow_recurrence(lmap: LorenzMap, x: float, delta: float, n: int) -> float:
    if n <= 0:
        raise ValueError("n must be positive")
    points, collision = _orbit_points(lmap, x, n)
    terms = _log_distances(lmap, points, delta)
    if collision is not None:
        raise CollisionAbort(collision, partial=float(terms.sum()) / max(len(points), 1))
    return float(terms.sum()) / n


def recurrence_profile(
    lmap: LorenzMap,
    x: float,
    deltas: Sequence[float],
    ns: Sequence[int],
    start: str = "explicit",
    levels: LevelStructure | None = None,
    geometry: GeometryReport | None = None,
) -> RecurrenceProfile:
    """Recurrence table over a (δ, n) grid from one orbit sweep.

    A collision truncates the n-grid at the collision step instead of
    failing. With `levels` and `geometry` every δ row gets the level
    bound from the measured ρ̂ and Ĉ₁.
    """
    n_max = max(ns)
    points, collision = _orbit_points(lmap, x, n_max)
    usable = [n for n in sorted(ns) if n <= len(points)]
    values = []
    for delta in deltas:
        cumulative = np.cumsum(_log_distances(lmap, points, delta))
        values.append([float(cumulative[n - 1]) / n for n in usable])
    bounds: list[float | None] = []
    if levels is not None and geometry is not None:
        bounds = [recurrence_bound(levels, geometry, delta) for delta in deltas]
    return RecurrenceProfile(
        start=start,
        x=x,
        deltas=list(deltas),
        ns=usable,
        values=values,
        bounds=bounds,
        collision_index=collision,
    )


def deepest_cover(levels: LevelStructure, delta: float) -> int:
    """Largest audited k with C_δ ⊂ C_k (0 when only C_0 = [0, 1] covers it)."""
    k0 = 0
    for record in levels.levels:
        if delta <= min(record.minus_width, record.plus_width):
            k0 = record.depth
    return k0


def recurrence_bound(levels: LevelStructure, geometry: GeometryReport, delta: float) -> float:
    return geometry.recurrence_bound(max(deepest_cover(levels, delta), 1))


def visit_count(lmap: LorenzMap, x: float, levels: LevelStructure, k: int, n: int) -> int:
    """#{0 <= i < n : f^i(x) ∈ C_k}."""
    if n <= 0:
        return 0
    points, collision = _orbit_points(lmap, x, n)
    if collision is not None:
        raise CollisionAbort(collision)
    p, q = levels.window(k)
    return int(np.count_nonzero((points > p) & (points < q)))


def visit_audit(
    lmap: LorenzMap,
    x: float,
    levels: LevelStructure,
    ks: Sequence[int],
    ns: Sequence[int],
) -> list[VisitAudit]:
    """Counts against (n + 1)/S_k for every (k, n), from one orbit."""
    points, collision = _orbit_points(lmap, x, max(ns))
    if collision is not None:
        raise CollisionAbort(collision)
    rows = []
    for k in ks:
        p, q = levels.window(k)
        visits = np.cumsum((points > p) & (points < q))
        s_k = levels.level(k).s
        for n in ns:
            count = int(visits[n - 1]) if n > 0 else 0
            rows.append(VisitAudit(k=k, n=n, count=count, bound=(n + 1) / s_k))
    return rows
