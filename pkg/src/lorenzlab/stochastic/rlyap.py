from __future__ import annotations

import math

import numpy as np
from pydantic import Field

from lorenzlab.maps.base import COLLISION_TOL, LorenzMap
from lorenzlab.maps.iterated import ClosedFormMap
from lorenzlab.measures.histogram import MeasureHistogram
from lorenzlab.schemas.common import FrozenModel

from .kernels import NoiseKernel
from .orbits import check_budget, noisy_step


class RandomLyapunovReport(FrozenModel):
    epsilon: float
    n: int
    trials: int
    exponents: list[float]
    mean: float
    spread: float
    positive_part: float = Field(ge=0.0)
    moderate_recurrence: float | None = None
    collisions: int = 0


class NearCriticalCheck(FrozenModel):
    epsilon: float
    integral: float = Field(ge=0.0)
    bound: float

    @property
    def ok(self) -> bool:
        return self.integral <= self.bound


def random_lyapunov(
    lmap: LorenzMap,
    kernel: NoiseKernel,
    n: int,
    *,
    trials: int = 100,
    seed: int = 0,
    start: float | None = None,
    delta: float | None = None,
) -> RandomLyapunovReport:
    """(1/n) Σ log Dg(x_i) along `trials` random orbits run side by side.

    Starts are uniform in [0, 1] unless `start` is given. Steps whose
    state sits on c are left out of the sum and counted. With `delta` the
    report also carries the moderate-recurrence average of log Dg over
    ε² < |x - c| < δ.
    """
    check_budget(lmap, kernel)
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    c = lmap.singular_point
    states = np.full(trials, float(start)) if start is not None else rng.random(trials)
    totals = np.zeros(trials)
    moderate = np.zeros(trials)
    collisions = 0
    inner = kernel.epsilon**2
    for _ in range(n):
        distance = np.abs(states - c)
        usable = distance > COLLISION_TOL
        terms = np.zeros(trials)
        terms[usable] = lmap.log_deriv_array(states[usable])
        totals += terms
        if delta is not None:
            window = usable & (distance > inner) & (distance < delta)
            moderate[window] += terms[window]
        states, hits = noisy_step(lmap, states, kernel.sample(rng, trials))
        collisions += hits
    exponents = totals / n
    return RandomLyapunovReport(
        epsilon=kernel.epsilon,
        n=n,
        trials=trials,
        exponents=[float(value) for value in exponents],
        mean=float(exponents.mean()),
        spread=float(exponents.std()),
        positive_part=float(np.maximum(exponents, 0.0).mean()),
        moderate_recurrence=float(moderate.mean() / n) if delta is not None else None,
        collisions=collisions,
    )


def near_critical_integral(lmap: ClosedFormMap, histogram: MeasureHistogram, epsilon: float) -> float:
    """∫_{|x-c|<ε²} |log Dg| dμ̂_ε, exact inside every bin."""
    c = lmap.singular_point
    lo, hi = c - epsilon**2, c + epsilon**2
    width = histogram.width
    first = max(int(lo / width), 0)
    last = min(int(hi / width), histogram.n_bins - 1)
    total = 0.0
    for k in range(first, last + 1):
        weight = float(histogram.weights[k])
        if weight == 0.0:
            continue
        a, b = max(lo, k * width), min(hi, (k + 1) * width)
        for piece_lo, piece_hi in ((a, min(b, c)), (max(a, c), b)):
            if piece_lo < piece_hi:
                total += weight * lmap.log_deriv_integral(piece_lo, piece_hi, absolute=True) / width
    return total


def near_critical_check(
    lmap: ClosedFormMap,
    histogram: MeasureHistogram,
    kernel: NoiseKernel,
    c0: float,
) -> NearCriticalCheck:
    """Compare against 2 d0 C₀ ε (1 - 2 log ε)(1 + w/ε²)."""
    eps = kernel.epsilon
    bound = 2.0 * kernel.d0 * c0 * eps * (1.0 - 2.0 * math.log(eps)) * (1.0 + histogram.width / eps**2)
    return NearCriticalCheck(epsilon=eps, integral=near_critical_integral(lmap, histogram, eps), bound=bound)
