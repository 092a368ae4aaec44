from __future__ import annotations

import numpy as np

from lorenzlab.schemas.common import FrozenModel, Side

from .base import LorenzMap


class NonFlatConstants(FrozenModel):
    """Constants with a|x-c|^(alpha-1) < Df(x) < b|x-c|^(alpha-1) and log Df >= c0 log|x-c| near c."""

    a: float
    b: float
    c0: float
    alpha: float
    lo: float
    hi: float

    def bounds(self, distance: float) -> tuple[float, float]:
        scale = distance ** (self.alpha - 1.0)
        return self.a * scale, self.b * scale


def _log_ratios(lmap: LorenzMap, distances: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = lmap.singular_point
    log_df = np.asarray(
        [lmap.branch_log_deriv(c - d, Side.LEFT) for d in distances]
        + [lmap.branch_log_deriv(c + d, Side.RIGHT) for d in distances]
    )
    log_d = np.log(np.concatenate([distances, distances]))
    return log_df, log_d


def fit_nonflat_constants(
    lmap: LorenzMap,
    alpha: float,
    *,
    lo: float = 1e-10,
    hi: float = 1e-2,
    points: int = 200,
    slack: float = 1e-3,
) -> NonFlatConstants:
    distances = np.geomspace(lo, hi, points)
    log_df, log_d = _log_ratios(lmap, distances)
    log_coefficient = log_df - (alpha - 1.0) * log_d
    a = float(np.exp(log_coefficient.min())) * (1.0 - slack)
    b = float(np.exp(log_coefficient.max())) * (1.0 + slack)
    # log Df / log d tends to alpha - 1 as d -> 0
    c0 = max(float(np.max(log_df / log_d)), alpha - 1.0) * (1.0 + slack)
    return NonFlatConstants(a=a, b=b, c0=c0, alpha=alpha, lo=lo, hi=hi)


def nonflat_violations(lmap: LorenzMap, constants: NonFlatConstants, samples: int = 1000, seed: int = 0) -> int:
    rng = np.random.default_rng(seed)
    distances = np.exp(rng.uniform(np.log(constants.lo), np.log(constants.hi), size=samples))
    log_df, log_d = _log_ratios(lmap, distances)
    log_coefficient = log_df - (constants.alpha - 1.0) * log_d
    below = log_coefficient <= np.log(constants.a)
    above = log_coefficient >= np.log(constants.b)
    return int(np.count_nonzero(below | above))
