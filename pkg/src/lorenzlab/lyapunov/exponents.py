from __future__ import annotations

import math

import numpy as np
from pydantic import Field

from lorenzlab.maps.base import LorenzMap
from lorenzlab.schemas.common import FrozenModel

GRID_FACTOR = 1.25
DEFAULT_N_MAX = 1_000_000


def geometric_grid(n_max: int, factor: float = GRID_FACTOR) -> list[int]:
    """Distinct ⌈factor^k⌉ up to n_max, always ending at n_max."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    grid: list[int] = []
    k = 0
    while True:
        n = math.ceil(factor**k)
        if n > n_max:
            break
        if not grid or n > grid[-1]:
            grid.append(n)
        k += 1
    if grid[-1] != n_max:
        grid.append(n_max)
    return grid


class ExponentTrace(FrozenModel):
    start: str
    x: float
    ns: list[int]
    values: list[float]
    collision_index: int | None = None

    @property
    def truncated(self) -> bool:
        return self.collision_index is not None

    @property
    def n_max(self) -> int:
        return self.ns[-1] if self.ns else 0

    def _decade(self, lo: float, hi: float) -> list[float]:
        return [abs(value) for n, value in zip(self.ns, self.values) if lo <= n <= hi]

    def first_decade_median(self) -> float:
        first = self.ns[0]
        return float(np.median(self._decade(first, 10 * first)))

    def last_decade_median(self) -> float:
        return float(np.median(self._decade(self.n_max / 10.0, self.n_max)))

    def last_decade_spread(self) -> float:
        window = [value for n, value in zip(self.ns, self.values) if n >= self.n_max / 10.0]
        return max(window) - min(window)

    def log_derivatives(self) -> list[float]:
        """log Df^n at every grid point."""
        return [n * value for n, value in zip(self.ns, self.values)]


class DerivativeEnvelope(FrozenModel):
    """|log Df^n(x)| <= log_c1 + n log_c_lambda on the sampled grid."""

    log_c1: float = Field(ge=0.0)
    log_c_lambda: float = Field(ge=0.0)

    def bound(self, n: int) -> float:
        return self.log_c1 + n * self.log_c_lambda


def lyapunov_trace(
    lmap: LorenzMap,
    x: float,
    n_max: int = DEFAULT_N_MAX,
    start: str = "explicit",
    factor: float = GRID_FACTOR,
) -> ExponentTrace:
    """(1/n) log Df^n(x) on a geometric n-grid, accumulated in log space."""
    orbit = lmap.orbit(x, n_max)
    collision = orbit.collision_index
    points = orbit.points[:collision] if collision is not None else orbit.points[:n_max]
    cumulative = np.cumsum(lmap.log_deriv_array(points))
    grid = [n for n in geometric_grid(n_max, factor) if n <= len(points)]
    values = [float(cumulative[n - 1]) / n for n in grid]
    return ExponentTrace(start=start, x=x, ns=grid, values=values, collision_index=collision)


def derivative_envelope(trace: ExponentTrace) -> DerivativeEnvelope:
    """Linear envelope fitted from the last decade slope, intercept covering every grid point."""
    magnitudes = [abs(value) for value in trace.log_derivatives()]
    tail = [
        magnitude / n for n, magnitude in zip(trace.ns, magnitudes) if n >= trace.n_max / 10.0
    ]
    log_c_lambda = max(tail)
    log_c1 = max(0.0, max(magnitude - n * log_c_lambda for n, magnitude in zip(trace.ns, magnitudes)))
    return DerivativeEnvelope(log_c1=log_c1, log_c_lambda=log_c_lambda)


def trace_agreement(first: ExponentTrace, second: ExponentTrace) -> tuple[float, float]:
    """(|difference at the common n_max|, combined last-decade spread)."""
    n = min(first.n_max, second.n_max)
    value_first = next(value for m, value in zip(reversed(first.ns), reversed(first.values)) if m <= n)
    value_second = next(value for m, value in zip(reversed(second.ns), reversed(second.values)) if m <= n)
    return abs(value_first - value_second), first.last_decade_spread() + second.last_decade_spread()


def truncated_orbit_average(lmap: LorenzMap, x: float, n: int, floor: float) -> float:
    """(1/n) Σ max(log Df(f^i x), -floor), the continuous truncation of log Df."""
    orbit = lmap.orbit(x, n)
    collision = orbit.collision_index
    points = orbit.points[:collision] if collision is not None else orbit.points[:n]
    values = np.maximum(lmap.log_deriv_array(points), -floor)
    return float(values.mean())
