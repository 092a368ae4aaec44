from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from lorenzlab.errors import CollisionAbort, NotMonotone
from lorenzlab.logging.jsonl import JsonlWriter
from lorenzlab.maps.base import LorenzMap
from lorenzlab.measures.histogram import DEFAULT_BINS, MeasureHistogram, sample_counts
from lorenzlab.schemas.common import StartPoint

from .levels import LevelStructure, return_times

DEFAULT_CHUNK = 1_000_000


def level_masses(types: Sequence[tuple[int, int]]) -> list[tuple[float, float]]:
    """Masses (x_n, y_n) of one interval of Λ_n^- and of Λ_n^+, for n = 1..N.

    Closed at the deepest level by x_N = y_N and S_N^- x_N + S_N^+ y_N = 1,
    then x_n = x_{n+1} + b_{n+1} y_{n+1}, y_n = a_{n+1} x_{n+1} + y_{n+1}.
    """
    if not types:
        return []
    times = return_times(types)
    s_minus, s_plus = times[-1]
    x = y = 1.0 / (s_minus + s_plus)
    masses = [(x, y)]
    for a, b in reversed(types[1:]):
        x, y = x + b * y, a * x + y
        masses.append((x, y))
    masses.reverse()
    return masses


def physical_measure(levels: LevelStructure, depth: int | None = None, n_bins: int = DEFAULT_BINS) -> MeasureHistogram:
    """μ̂: every interval of Λ_N^- carries x_N, every interval of Λ_N^+ carries y_N."""
    depth = levels.depth if depth is None else depth
    if not 1 <= depth <= levels.depth:
        raise ValueError(f"depth {depth} outside 1..{levels.depth}")
    records = levels.levels[:depth]
    for record in records:
        if not record.monotone:
            raise NotMonotone(f"level {record.depth} has type ({record.a},{record.b})")
    x_n, y_n = level_masses([(record.a, record.b) for record in records])[-1]
    deepest = records[-1]
    intervals = deepest.intervals_minus + deepest.intervals_plus
    masses = [x_n] * len(deepest.intervals_minus) + [y_n] * len(deepest.intervals_plus)
    return MeasureHistogram.from_intervals(intervals, masses, n_bins)


def window_masses(levels: LevelStructure, depth: int | None = None) -> list[tuple[int, float, float]]:
    """(n, μ̂(C_n), 2/S_n) for every level up to `depth`."""
    depth = levels.depth if depth is None else depth
    masses = level_masses(levels.types[:depth])
    return [
        (record.depth, x + y, 2.0 / record.s)
        for record, (x, y) in zip(levels.levels[:depth], masses)
    ]


def _start(lmap: LorenzMap, start: StartPoint) -> float:
    c1_minus, c1_plus = lmap.critical_values
    return c1_plus if start == StartPoint.C1_PLUS else c1_minus


def _orbit_counts(lmap: LorenzMap, x: float, burn_in: int, samples: int, n_bins: int, chunk: int) -> np.ndarray:
    counts = np.zeros(n_bins, dtype=np.int64)
    seen = 0
    for segment in lmap.orbit_chunks(x, burn_in + samples, chunk):
        points = segment.points
        if segment.truncated:
            raise CollisionAbort(int(segment.collision_index or 0), partial=counts)
        keep = points[max(0, burn_in - seen) :]
        seen += len(points)
        if keep.size:
            counts += sample_counts(keep, n_bins)
    return counts


def birkhoff_measure(
    lmap: LorenzMap,
    burn_in: int,
    samples: int,
    n_bins: int = DEFAULT_BINS,
    start: StartPoint = StartPoint.C1_PLUS,
    chunk: int = DEFAULT_CHUNK,
    writer: JsonlWriter | None = None,
) -> MeasureHistogram:
    """Empirical histogram of one critical orbit after `burn_in` steps.

    A collision from the first start point restarts the orbit from the
    other critical value; a second collision raises CollisionAbort.
    """
    order = [start, StartPoint.C1_MINUS if start == StartPoint.C1_PLUS else StartPoint.C1_PLUS]
    failure: CollisionAbort | None = None
    for point in order:
        try:
            counts = _orbit_counts(lmap, _start(lmap, point), burn_in, samples, n_bins, chunk)
        except CollisionAbort as exc:
            if writer is not None:
                writer.event("birkhoff_collision", start=point.value, index=exc.index)
            failure = exc
            continue
        return MeasureHistogram.from_weights(counts.astype(float))
    assert failure is not None
    raise CollisionAbort(failure.index, partial=failure.partial)
