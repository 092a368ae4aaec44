from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from pydantic import Field

from lorenzlab.logging.jsonl import JsonlWriter
from lorenzlab.maps.base import LorenzMap
from lorenzlab.schemas.common import FrozenModel, Side

from .kernels import NoiseKernel
from .orbits import noise_budget, noisy_step

NOISE_EXPONENT = 0.6
DEFAULT_KS = (2.0, 1.0, 0.5, 0.25, 0.2, 0.15, 0.11)


class ShadowRow(FrozenModel):
    eta: float = Field(gt=0.0)
    side: Side
    epsilon: float
    n_max: int
    trials: int
    pass_fraction: float
    first_step_max: float
    first_step_bound: float

    @property
    def first_step_ok(self) -> bool:
        return self.first_step_max < self.first_step_bound


class ShadowingReport(FrozenModel):
    k: float
    xi: float
    delta: float
    rows: list[ShadowRow]

    @property
    def passed(self) -> bool:
        return all(row.pass_fraction == 1.0 and row.first_step_ok for row in self.rows)


def shadow_steps(k: float, eta: float) -> int:
    return int(math.floor(-k * math.log(eta)))


def _row(
    lmap: LorenzMap,
    eta: float,
    side: Side,
    k: float,
    xi: float,
    trials: int,
    rng: np.random.Generator,
) -> ShadowRow:
    c = lmap.singular_point
    epsilon = min(eta**NOISE_EXPONENT, noise_budget(lmap))
    kernel = NoiseKernel(epsilon=epsilon)
    n_max = shadow_steps(k, eta)
    target = lmap.branch(c, side)
    states = np.full(trials, c + (eta if side == Side.RIGHT else -eta))
    passes = 0
    first_step = 0.0
    for n in range(1, n_max + 1):
        states, _ = noisy_step(lmap, states, kernel.sample(rng, trials))
        error = np.abs(states - target)
        if n == 1:
            first_step = float(error.max())
        passes += int(np.count_nonzero(error < xi * abs(target - c)))
        target = lmap.eval(target)
    return ShadowRow(
        eta=eta,
        side=side,
        epsilon=epsilon,
        n_max=n_max,
        trials=trials,
        pass_fraction=passes / (trials * n_max) if n_max else 1.0,
        first_step_max=first_step,
        first_step_bound=2.0 * math.sqrt(eta),
    )


def shadowing_check(
    lmap: LorenzMap,
    etas: Sequence[float],
    *,
    k: float,
    xi: float = 0.5,
    delta: float | None = None,
    trials: int = 1000,
    seed: int = 0,
) -> ShadowingReport:
    """Random orbits from c ± η against the critical orbits of the matching side.

    Noise amplitude is ε = min(η^0.6, budget), so ε² < η. The pass fraction
    counts the (trial, n) pairs with |x_n - f^{n-1}(c₁^±)| < ξ |f^{n-1}(c₁^±) - c|
    over 1 <= n <= -K log η.
    """
    if not 0.0 < xi <= 0.5:
        raise ValueError("xi must lie in (0, 1/2]")
    delta = delta if delta is not None else 2.0 * max(etas)
    if any(eta >= delta for eta in etas):
        raise ValueError("every eta must be below delta")
    rng = np.random.default_rng(seed)
    rows = [_row(lmap, float(eta), side, k, xi, trials, rng) for eta in etas for side in (Side.LEFT, Side.RIGHT)]
    return ShadowingReport(k=k, xi=xi, delta=delta, rows=rows)


def shadowing_witness(
    lmap: LorenzMap,
    etas: Sequence[float],
    *,
    ks: Sequence[float] = DEFAULT_KS,
    xi: float = 0.5,
    delta: float | None = None,
    trials: int = 1000,
    seed: int = 0,
    writer: JsonlWriter | None = None,
) -> ShadowingReport | None:
    """Largest K in `ks` for which every trial at every η passes, or None.

    K values that leave no step to check for some η are skipped.
    """
    delta = delta if delta is not None else 2.0 * max(etas)
    for k in sorted(ks, reverse=True):
        if any(shadow_steps(k, eta) < 1 for eta in etas):
            continue
        report = shadowing_check(lmap, etas, k=k, xi=xi, delta=delta, trials=trials, seed=seed)
        if writer is not None:
            writer.event("shadowing_candidate", k=k, passed=report.passed)
        if report.passed:
            return report
    return None
