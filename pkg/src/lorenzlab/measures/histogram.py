from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

DEFAULT_BINS = 4096
NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MeasureHistogram:
    """Probability measure on [0, 1] with constant density on each of `n_bins` equal bins."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise ValueError("weights must be a non-empty vector")
        if np.any(weights < 0.0):
            raise ValueError("weights must be nonnegative")
        total = float(weights.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL * max(1, weights.size):
            raise ValueError(f"weights sum to {total!r}, not 1")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @property
    def n_bins(self) -> int:
        return int(self.weights.size)

    @property
    def width(self) -> float:
        return 1.0 / self.n_bins

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_bins + 1)

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n_bins) + 0.5) * self.width

    @property
    def density(self) -> np.ndarray:
        return self.weights / self.width

    @property
    def max_density(self) -> float:
        return float(self.density.max())

    def cdf(self) -> np.ndarray:
        """Cumulative mass at the right edge of every bin."""
        return np.cumsum(self.weights)

    def mass_in(self, lo: float, hi: float) -> float:
        """Mass of [lo, hi], assuming constant density inside each bin."""
        if hi <= lo:
            return 0.0
        edges = self.edges
        overlap = np.clip(np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo), 0.0, None)
        return float(np.dot(self.weights, overlap) / self.width)

    def expectation(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def support(self, threshold: float = 0.0) -> np.ndarray:
        return np.flatnonzero(self.weights > threshold)

    @classmethod
    def from_weights(cls, weights: Iterable[float]) -> MeasureHistogram:
        raw = np.asarray(list(weights) if not isinstance(weights, np.ndarray) else weights, dtype=float)
        total = raw.sum()
        if total <= 0.0:
            raise ValueError("cannot normalize a histogram with no mass")
        return cls(raw / total)

    @classmethod
    def from_samples(cls, points: np.ndarray, n_bins: int = DEFAULT_BINS) -> MeasureHistogram:
        counts = sample_counts(points, n_bins)
        return cls.from_weights(counts.astype(float))

    @classmethod
    def from_intervals(
        cls,
        intervals: Iterable[tuple[float, float]],
        masses: Iterable[float],
        n_bins: int = DEFAULT_BINS,
    ) -> MeasureHistogram:
        """Spread each mass uniformly over its interval; degenerate intervals act as point masses."""
        weights = np.zeros(n_bins)
        for (lo, hi), mass in zip(intervals, masses):
            deposit(weights, lo, hi, mass)
        return cls.from_weights(weights)

    @classmethod
    def point_mass(cls, x: float, n_bins: int = DEFAULT_BINS) -> MeasureHistogram:
        weights = np.zeros(n_bins)
        weights[bin_index(x, n_bins)] = 1.0
        return cls(weights)

    def pushforward_affine(self, scale: float, offset: float) -> MeasureHistogram:
        """Image under x -> offset + scale * x (scale > 0), rebinned on the same grid."""
        if scale <= 0.0:
            raise ValueError("scale must be positive")
        edges = offset + scale * self.edges
        lo = np.clip(edges[:-1], 0.0, 1.0)
        hi = np.clip(edges[1:], 0.0, 1.0)
        mask = self.weights > 0.0
        return MeasureHistogram.from_intervals(zip(lo[mask], hi[mask]), self.weights[mask], self.n_bins)


def bin_index(x: float, n_bins: int) -> int:
    return min(max(int(x * n_bins), 0), n_bins - 1)


def sample_counts(points: np.ndarray, n_bins: int) -> np.ndarray:
    index = np.clip((np.asarray(points, dtype=float) * n_bins).astype(np.int64), 0, n_bins - 1)
    return np.bincount(index.ravel(), minlength=n_bins)


def deposit(weights: np.ndarray, lo: float, hi: float, mass: float) -> None:
    n_bins = weights.size
    first = bin_index(lo, n_bins)
    last = bin_index(hi, n_bins)
    if hi <= lo or first == last:
        weights[first] += mass
        return
    edges = np.arange(first, last + 2) / n_bins
    overlap = np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo)
    weights[first : last + 1] += mass * np.clip(overlap, 0.0, None) / (hi - lo)


def w1(first: MeasureHistogram, second: MeasureHistogram) -> float:
    """Kantorovich distance as the L1 distance between the two CDFs on the common grid."""
    if first.n_bins != second.n_bins:
        raise ValueError(f"grids differ: {first.n_bins} vs {second.n_bins} bins")
    return float(np.abs(first.cdf() - second.cdf()).sum() * first.width)
