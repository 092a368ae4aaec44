from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lorenzlab.errors import EpsilonExceedsBudget
from lorenzlab.maps.base import COLLISION_TOL, LorenzMap
from lorenzlab.maps.restricted import RestrictedMap

from .kernels import NoiseKernel


def noise_budget(lmap: LorenzMap) -> float:
    """Largest noise amplitude that keeps every state in [0, 1]."""
    if isinstance(lmap, RestrictedMap):
        return lmap.epsilon_budget
    return 0.0


def check_budget(lmap: LorenzMap, kernel: NoiseKernel) -> None:
    budget = noise_budget(lmap)
    if kernel.epsilon > budget:
        raise EpsilonExceedsBudget(kernel.epsilon, budget)


def noisy_step(lmap: LorenzMap, states: np.ndarray, draws: np.ndarray) -> tuple[np.ndarray, int]:
    """x -> g(x) + t for every state; states at c move to c ± tol on the side of their draw."""
    c = lmap.singular_point
    hit = np.abs(states - c) <= COLLISION_TOL
    collisions = int(np.count_nonzero(hit))
    if collisions:
        states = states.copy()
        states[hit] = c + np.where(draws[hit] >= 0.0, 2.0, -2.0) * COLLISION_TOL
    return lmap.eval_array(states) + draws, collisions


@dataclass(frozen=True, eq=False)
class RandomOrbitRecord:
    seed: int
    x: float
    draws: np.ndarray
    states: np.ndarray
    collisions: int = 0

    def __len__(self) -> int:
        return int(self.draws.size)

    def same_as(self, other: RandomOrbitRecord) -> bool:
        return (
            self.seed == other.seed
            and self.x == other.x
            and np.array_equal(self.draws, other.draws)
            and np.array_equal(self.states, other.states)
        )


def random_orbit(lmap: LorenzMap, x: float, kernel: NoiseKernel, n: int, seed: int) -> RandomOrbitRecord:
    """x_k = g(x_{k-1}) + t_k with t_1..t_n drawn up front from one seeded stream."""
    check_budget(lmap, kernel)
    rng = np.random.default_rng(seed)
    draws = kernel.sample(rng, n)
    states = np.empty(n + 1)
    states[0] = x
    current = np.array([x])
    collisions = 0
    for k in range(n):
        current, hits = noisy_step(lmap, current, draws[k : k + 1])
        collisions += hits
        states[k + 1] = current[0]
    return RandomOrbitRecord(seed=seed, x=x, draws=draws, states=states, collisions=collisions)
