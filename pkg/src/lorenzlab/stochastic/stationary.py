from __future__ import annotations

import math

import numpy as np
from pydantic import Field
from scipy import sparse

from lorenzlab.errors import GridTooCoarse
from lorenzlab.logging.jsonl import JsonlWriter
from lorenzlab.maps.base import LorenzMap
from lorenzlab.measures.histogram import MeasureHistogram, sample_counts, w1
from lorenzlab.schemas.common import FrozenModel

from .kernels import NoiseKernel
from .orbits import check_budget, noisy_step

GRID_RESOLUTION = 5.0
DEFAULT_TOL = 1e-12
RESIDUAL_TOL = 1e-10
DEFAULT_MAX_ITER = 200_000
DEFAULT_CHAINS = 64
SAMPLE_BLOCK = 4096


class UlamReport(FrozenModel):
    epsilon: float
    n_bins: int
    iterations: int = Field(ge=0)
    step_change: float
    residual: float
    row_sum_error: float
    max_density: float
    density_bound: float

    @property
    def converged(self) -> bool:
        return self.residual < RESIDUAL_TOL


def _check_grid(kernel: NoiseKernel, n_bins: int) -> None:
    width = 1.0 / n_bins
    if kernel.degenerate or width > kernel.epsilon / GRID_RESOLUTION:
        raise GridTooCoarse(width, kernel.epsilon)


def transition_matrix(lmap: LorenzMap, kernel: NoiseKernel, n_bins: int) -> sparse.csr_matrix:
    """Ulam discretisation of T_ε: row i is θ_ε centred at g(center_i), integrated over each bin."""
    width = 1.0 / n_bins
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    centers = (np.arange(n_bins) + 0.5) * width
    images = lmap.eval_array(centers)
    band = math.ceil(2.0 * kernel.epsilon / width) + 2
    first = np.floor((images - kernel.epsilon) * n_bins).astype(np.int64)
    columns = first[:, None] + np.arange(band)[None, :]
    valid = (columns >= 0) & (columns < n_bins)
    safe = np.clip(columns, 0, n_bins - 1)
    upper = kernel.cdf(edges[safe + 1] - images[:, None])
    lower = kernel.cdf(edges[safe] - images[:, None])
    values = np.where(valid, upper - lower, 0.0)
    rows = np.repeat(np.arange(n_bins), band)
    matrix = sparse.coo_matrix((values.ravel(), (rows, safe.ravel())), shape=(n_bins, n_bins))
    matrix = matrix.tocsr()
    matrix.eliminate_zeros()
    return matrix


def row_sum_error(matrix: sparse.csr_matrix) -> float:
    return float(np.abs(np.asarray(matrix.sum(axis=1)).ravel() - 1.0).max())


def stationary_vector(
    matrix: sparse.csr_matrix,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[np.ndarray, int, float, float]:
    """Left fixed vector of a row-stochastic matrix: (π, iterations, sup step change, L1 residual)."""
    n_states = matrix.shape[0]
    transpose = matrix.T.tocsr()
    pi = np.full(n_states, 1.0 / n_states)
    step_change = math.inf
    residual = math.inf
    iterations = 0
    while iterations < max_iter:
        delta = transpose @ pi - pi
        residual = float(np.abs(delta).sum())
        step_change = 0.5 * float(np.abs(delta).max())
        if step_change < tol and residual < RESIDUAL_TOL:
            break
        pi = np.clip(pi + 0.5 * delta, 0.0, None)
        pi /= pi.sum()
        iterations += 1
    return pi, iterations, step_change, residual


def stationary_ulam(
    lmap: LorenzMap,
    kernel: NoiseKernel,
    n_bins: int,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    writer: JsonlWriter | None = None,
) -> tuple[MeasureHistogram, UlamReport]:
    """Stationary vector of the Ulam matrix by lazy power iteration.

    The lazy chain (I + M)/2 has the same fixed vector as M and no
    periodic part. Iteration stops once the sup-norm of one step is below
    `tol` and the L1 invariance residual is below 1e-10.
    """
    check_budget(lmap, kernel)
    _check_grid(kernel, n_bins)
    matrix = transition_matrix(lmap, kernel, n_bins)
    pi, iterations, step_change, residual = stationary_vector(matrix, tol=tol, max_iter=max_iter)
    histogram = MeasureHistogram.from_weights(pi)
    report = UlamReport(
        epsilon=kernel.epsilon,
        n_bins=n_bins,
        iterations=iterations,
        step_change=step_change,
        residual=residual,
        row_sum_error=row_sum_error(matrix),
        max_density=histogram.max_density,
        density_bound=kernel.d0 / kernel.epsilon * (1.0 + 1.0 / (n_bins * kernel.epsilon)),
    )
    if writer is not None:
        writer.event("ulam_finished", **report.model_dump())
    return histogram, report


def stationary_mc(
    lmap: LorenzMap,
    kernel: NoiseKernel,
    n: int,
    *,
    burn_in: int = 10_000,
    n_bins: int = 4096,
    seed: int = 0,
    chains: int = DEFAULT_CHAINS,
    writer: JsonlWriter | None = None,
) -> MeasureHistogram:
    """Histogram of `n` post-burn-in states spread over independent chains."""
    check_budget(lmap, kernel)
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    chains = max(1, min(chains, n))
    states = rng.random(chains)
    for _ in range(burn_in):
        states, _ = noisy_step(lmap, states, kernel.sample(rng, chains))
    per_chain = math.ceil(n / chains)
    counts = np.zeros(n_bins, dtype=np.int64)
    collisions = 0
    done = 0
    while done < per_chain:
        block = min(SAMPLE_BLOCK, per_chain - done)
        draws = kernel.sample(rng, (block, chains))
        buffer = np.empty((block, chains))
        for k in range(block):
            states, hits = noisy_step(lmap, states, draws[k])
            collisions += hits
            buffer[k] = states
        counts += sample_counts(buffer, n_bins)
        done += block
    if writer is not None:
        writer.event("mc_finished", epsilon=kernel.epsilon, samples=per_chain * chains, collisions=collisions)
    return MeasureHistogram.from_weights(counts.astype(float))


def invariance_residual(lmap: LorenzMap, kernel: NoiseKernel, histogram: MeasureHistogram) -> float:
    """W₁ between a histogram and its image under one smeared step on the same grid."""
    matrix = transition_matrix(lmap, kernel, histogram.n_bins)
    pushed = MeasureHistogram.from_weights(matrix.T @ histogram.weights)
    return w1(histogram, pushed)
