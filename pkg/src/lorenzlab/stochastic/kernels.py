from __future__ import annotations

import numpy as np
from pydantic import Field

from lorenzlab.schemas.common import FrozenModel, KernelShape

_SUP_DENSITY = {KernelShape.UNIFORM: 0.5, KernelShape.TRIANGULAR: 1.0}


class NoiseKernel(FrozenModel):
    """Density θ_ε on [-ε, ε]; ε = 0 is the point mass at 0."""

    shape: KernelShape = KernelShape.UNIFORM
    epsilon: float = Field(ge=0.0)

    @property
    def d0(self) -> float:
        """sup θ_ε = d0 / ε."""
        return _SUP_DENSITY[self.shape]

    @property
    def degenerate(self) -> bool:
        return self.epsilon == 0.0

    def density(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        eps = self.epsilon
        if self.degenerate:
            return np.where(t == 0.0, np.inf, 0.0)
        inside = np.abs(t) <= eps
        if self.shape == KernelShape.UNIFORM:
            return np.where(inside, 0.5 / eps, 0.0)
        return np.where(inside, (eps - np.abs(t)) / (eps * eps), 0.0)

    def cdf(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        eps = self.epsilon
        if self.degenerate:
            return (t > 0.0).astype(float)
        if self.shape == KernelShape.UNIFORM:
            return np.clip((t + eps) / (2.0 * eps), 0.0, 1.0)
        s = np.clip(t, -eps, eps)
        rising = (s + eps) ** 2 / (2.0 * eps * eps)
        falling = 1.0 - (eps - s) ** 2 / (2.0 * eps * eps)
        return np.where(s <= 0.0, rising, falling)

    def ppf(self, p: np.ndarray | float) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        eps = self.epsilon
        if self.degenerate:
            return np.zeros_like(p)
        if self.shape == KernelShape.UNIFORM:
            return -eps + 2.0 * eps * p
        low = -eps + eps * np.sqrt(2.0 * np.clip(p, 0.0, 0.5))
        high = eps - eps * np.sqrt(2.0 * np.clip(1.0 - p, 0.0, 0.5))
        return np.where(p <= 0.5, low, high)

    def sample(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> np.ndarray:
        """Inverse-CDF draws; always inside [-ε, ε]."""
        return np.clip(self.ppf(rng.random(size)), -self.epsilon, self.epsilon)
