import numpy as np
import pytest

from lorenzlab.attractor.geometry import geometry_report
from lorenzlab.attractor.levels import LevelStructure, return_times
from lorenzlab.attractor.measure import birkhoff_measure, level_masses, physical_measure, window_masses
from lorenzlab.measures.histogram import w1
from lorenzlab.schemas.common import GeometryVerdict


def test_return_time_recursion() -> None:
    assert return_times([(2, 2)] * 4) == [(3, 3), (9, 9), (27, 27), (81, 81)]
    assert return_times([(1, 2), (2, 1)]) == [(2, 3), (8, 5)]
    assert all(min(pair) >= 2**n for n, pair in enumerate(return_times([(1, 1)] * 6), start=1))


def test_level_masses_sum_to_one_at_every_depth() -> None:
    types = [(2, 2), (2, 3), (3, 2)]
    for (x, y), (s_minus, s_plus) in zip(level_masses(types), return_times(types)):
        assert s_minus * x + s_plus * y == pytest.approx(1.0)


def test_levels_of_tuned_map(levels: LevelStructure) -> None:
    assert levels.depth == 2
    assert [(record.s_minus, record.s_plus) for record in levels.levels] == [(3, 3), (9, 9)]
    first, second = levels.levels
    assert first.p < second.p < second.c < second.q < first.q
    assert first.direct_return == (3, 3)
    assert len(first.intervals) == 6
    assert second.total_length < first.total_length


def test_cycle_intervals_have_disjoint_interiors(levels: LevelStructure) -> None:
    ordered = levels.level(2).intervals
    assert all(hi <= lo for (_, hi), (lo, _) in zip(ordered, ordered[1:]))


def test_geometry_report_is_bounded_for_two_levels(levels: LevelStructure) -> None:
    report = geometry_report(levels)
    assert report.verdict == GeometryVerdict.BOUNDED
    assert 0.0 < report.mu_hat <= report.lambda_hat < 1.0
    assert 0.0 < report.rho_hat < 1.0
    assert report.audited_depth == 2
    assert all(item.children_ok for item in report.levels)


def test_geometry_needs_two_levels(levels: LevelStructure) -> None:
    shallow = LevelStructure(base=levels.base, levels=levels.levels[:1])
    with pytest.raises(ValueError):
        geometry_report(shallow)


def test_window_masses_respect_two_over_return_time(levels: LevelStructure) -> None:
    for _, mass, bound in window_masses(levels):
        assert mass <= bound + 1e-12


def test_physical_measure_lives_on_the_cycle(levels: LevelStructure) -> None:
    measure = physical_measure(levels, n_bins=2048)
    assert measure.weights.sum() == pytest.approx(1.0)
    intervals = levels.level(2).intervals
    edges = measure.edges
    for k in measure.support():
        lo, hi = edges[k], edges[k + 1]
        assert any(a <= hi and lo <= b for a, b in intervals)


def test_birkhoff_histogram_approaches_the_physical_measure(levels: LevelStructure) -> None:
    n_bins = 1024
    empirical = birkhoff_measure(levels.base, burn_in=100, samples=50_000, n_bins=n_bins)
    reference = physical_measure(levels, n_bins=n_bins)
    assert np.isclose(empirical.weights.sum(), 1.0)
    assert w1(empirical, reference) < 4.0 / levels.level(2).s + 2.0 / n_bins


@pytest.mark.parametrize("depth", [1, 3, 6])
def test_constant_one_one_cascade_doubles(depth: int) -> None:
    types = [(1, 1)] * depth
    assert return_times(types) == [(2**n, 2**n) for n in range(1, depth + 1)]
    for n, (x, y) in enumerate(level_masses(types), start=1):
        assert x == pytest.approx(1.0 / 2 ** (n + 1))
        assert y == pytest.approx(1.0 / 2 ** (n + 1))
