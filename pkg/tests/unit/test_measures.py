import numpy as np
import pytest

from lorenzlab.measures.histogram import MeasureHistogram, w1


def test_w1_of_identical_histograms_is_zero() -> None:
    measure = MeasureHistogram.from_weights(np.arange(1.0, 65.0))
    assert w1(measure, measure) == 0.0


def test_w1_between_extreme_point_masses_is_one() -> None:
    left = MeasureHistogram.point_mass(0.0, n_bins=100)
    right = MeasureHistogram.point_mass(1.0, n_bins=100)
    # bin centres are 0.005 and 0.995
    assert w1(left, right) == pytest.approx(0.99)


def test_w1_rejects_different_grids() -> None:
    with pytest.raises(ValueError):
        w1(MeasureHistogram.point_mass(0.5, n_bins=10), MeasureHistogram.point_mass(0.5, n_bins=20))


def test_weights_must_be_a_probability_vector() -> None:
    with pytest.raises(ValueError):
        MeasureHistogram(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        MeasureHistogram.from_weights([0.0, 0.0])


def test_interval_masses_are_spread_uniformly() -> None:
    measure = MeasureHistogram.from_intervals([(0.0, 0.5)], [1.0], n_bins=8)
    assert np.allclose(measure.weights[:4], 0.25)
    assert measure.weights[4:].sum() == 0.0
    assert measure.mass_in(0.0, 0.25) == pytest.approx(0.5)
    assert measure.max_density == pytest.approx(2.0)


def test_affine_pushforward_moves_mass() -> None:
    measure = MeasureHistogram.from_intervals([(0.0, 0.5)], [1.0], n_bins=8)
    shifted = measure.pushforward_affine(1.0, 0.25)
    assert shifted.mass_in(0.25, 0.75) == pytest.approx(1.0)
    assert w1(measure, shifted) == pytest.approx(0.25)


def test_sample_histogram_counts_every_point() -> None:
    points = np.array([0.01, 0.02, 0.51, 0.99, 1.0])
    measure = MeasureHistogram.from_samples(points, n_bins=4)
    assert measure.weights.tolist() == [0.4, 0.0, 0.2, 0.4]
