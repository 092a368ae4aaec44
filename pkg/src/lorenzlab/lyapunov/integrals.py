from __future__ import annotations

import math

import numpy as np
from pydantic import Field

from lorenzlab.attractor.geometry import GeometryReport
from lorenzlab.attractor.levels import LevelStructure
from lorenzlab.attractor.measure import level_masses
from lorenzlab.maps.analysis import NonFlatConstants
from lorenzlab.maps.base import COLLISION_TOL
from lorenzlab.maps.iterated import ClosedFormMap
from lorenzlab.measures.histogram import MeasureHistogram
from lorenzlab.schemas.common import FrozenModel, Side


class IntegralRow(FrozenModel):
    n: int = Field(ge=0)
    value: float
    increment: float
    increment_bound: float | None


class IntegrabilityReport(FrozenModel):
    rows: list[IntegralRow]
    c2: float | None

    @property
    def nondecreasing(self) -> bool:
        values = [row.value for row in self.rows]
        return all(later >= earlier for earlier, later in zip(values, values[1:]))

    @property
    def bounded(self) -> bool:
        return self.c2 is not None and all(row.value <= self.c2 for row in self.rows)


class ChiEstimate(FrozenModel):
    value: float
    grid_error: float = Field(ge=0.0)
    depth_error: float = Field(ge=0.0)
    tail_error: float = Field(ge=0.0)

    @property
    def error(self) -> float:
        return self.grid_error + self.depth_error + self.tail_error

    def contains(self, target: float) -> bool:
        return abs(self.value - target) <= self.error


def _pieces(lo: float, hi: float, hole: tuple[float, float]) -> list[tuple[float, float]]:
    """[lo, hi] minus the open interval `hole`."""
    a, b = hole
    pieces = []
    if lo < min(hi, a):
        pieces.append((lo, min(hi, a)))
    if max(lo, b) < hi:
        pieces.append((max(lo, b), hi))
    return pieces


def _weighted_bins(measure: MeasureHistogram) -> list[tuple[int, float, float, float]]:
    edges = measure.edges
    return [(int(k), float(edges[k]), float(edges[k + 1]), float(measure.weights[k])) for k in measure.support()]


def truncated_log_df_integral(lmap: ClosedFormMap, measure: MeasureHistogram, levels: LevelStructure, n: int) -> float:
    """∫ ψ_n dμ̂ with ψ_n = |log Df| off C_n and 0 on C_n; exact on every bin."""
    if n == 0:
        return 0.0
    hole = levels.window(n)
    width = measure.width
    total = 0.0
    for _, lo, hi, weight in _weighted_bins(measure):
        piece_integral = sum(lmap.log_deriv_integral(a, b, absolute=True) for a, b in _pieces(lo, hi, hole))
        total += weight * piece_integral / width
    return total


def integrability_report(
    lmap: ClosedFormMap,
    measure: MeasureHistogram,
    levels: LevelStructure,
    constants: NonFlatConstants | None = None,
    geometry: GeometryReport | None = None,
) -> IntegrabilityReport:
    """Truncated integrals for n = 0..N with the per-level bounds and the constant C₂.

    The increment bound between C_k and C_{k+1} is (2/S_k) C₀ (-log min |C_{k+1}^±|);
    C₂ adds the closed-form tail beyond the audited depth.
    """
    rows: list[IntegralRow] = []
    previous = 0.0
    for n in range(levels.depth + 1):
        value = truncated_log_df_integral(lmap, measure, levels, n)
        bound = None
        if constants is not None and n >= 2:
            k = n - 1
            record = levels.level(k)
            following = levels.level(n)
            bound = (2.0 / record.s) * constants.c0 * -math.log(min(following.minus_width, following.plus_width))
        rows.append(IntegralRow(n=n, value=value, increment=value - previous, increment_bound=bound))
        previous = value
    c2 = None
    if constants is not None and geometry is not None and len(rows) > 1:
        c2 = rows[1].value + sum(row.increment_bound or 0.0 for row in rows[2:])
        c2 += constants.c0 * geometry.recurrence_bound(levels.depth)
    return IntegrabilityReport(rows=rows, c2=c2)


def _oscillation(lmap: ClosedFormMap, lo: float, hi: float) -> float:
    c = lmap.singular_point
    if lo < c < hi:
        return math.inf
    side = Side.LEFT if hi <= c else Side.RIGHT
    return abs(lmap.branch_log_deriv(hi, side) - lmap.branch_log_deriv(lo, side))


def chi_mu_estimate(
    lmap: ClosedFormMap,
    measure: MeasureHistogram,
    levels: LevelStructure | None = None,
    geometry: GeometryReport | None = None,
    constants: NonFlatConstants | None = None,
) -> ChiEstimate:
    """Signed quadrature of ∫ log Df dμ̂ with an error bar.

    The collision neighbourhood of c is cut out of its bin and that bin's
    mass spread over the remainder. grid_error covers the bin-level
    smearing away from c. With a level structure, depth_error covers the
    position of mass inside the deepest cycle intervals plus the
    terminal-condition mass 2/S_N; tail_error bounds ∫_{C_N} |log Df| dμ
    from the non-flatness constant and the measured geometry.
    """
    c = lmap.singular_point
    hole = (c - COLLISION_TOL, c + COLLISION_TOL)
    value = 0.0
    grid_error = 0.0
    for _, lo, hi, weight in _weighted_bins(measure):
        pieces = _pieces(lo, hi, hole)
        length = sum(b - a for a, b in pieces)
        if length <= 0.0:
            continue
        value += weight * sum(lmap.log_deriv_integral(a, b) for a, b in pieces) / length
        if not lo < c < hi:
            grid_error += weight * _oscillation(lmap, lo, hi)
    if levels is None:
        return ChiEstimate(value=value, grid_error=grid_error, depth_error=0.0, tail_error=0.0)

    deepest = levels.levels[-1]
    x_n, y_n = level_masses(levels.types)[-1]
    depth_error = 0.0
    worst = 0.0
    for intervals, mass in ((deepest.intervals_minus[1:], x_n), (deepest.intervals_plus[1:], y_n)):
        for lo, hi in intervals:
            depth_error += mass * _oscillation(lmap, lo, hi)
            ends = np.abs([lmap.log_deriv(lo), lmap.log_deriv(hi)])
            worst = max(worst, float(ends.max()))
    depth_error += (2.0 / deepest.s) * worst
    tail_error = math.inf
    if geometry is not None and constants is not None:
        tail_error = constants.c0 * geometry.recurrence_bound(levels.depth)
    return ChiEstimate(value=value, grid_error=grid_error, depth_error=depth_error, tail_error=tail_error)


def truncated_observable_integral(lmap: ClosedFormMap, measure: MeasureHistogram, floor: float) -> float:
    """∫ max(log Df, -floor) dμ̂, exact per bin."""
    width = measure.width
    lower = (lmap.log_deriv_level(-floor, Side.LEFT), lmap.log_deriv_level(-floor, Side.RIGHT))
    total = 0.0
    for _, lo, hi, weight in _weighted_bins(measure):
        clipped = _pieces(lo, hi, lower)
        inner = sum(b - a for a, b in _intersect(lo, hi, lower))
        integral = sum(lmap.log_deriv_integral(a, b) for a, b in clipped) - floor * inner
        total += weight * integral / width
    return total


def _intersect(lo: float, hi: float, window: tuple[float, float]) -> list[tuple[float, float]]:
    a, b = max(lo, window[0]), min(hi, window[1])
    return [(a, b)] if a < b else []
