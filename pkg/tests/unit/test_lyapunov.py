import math

import pytest

from lorenzlab.attractor.geometry import geometry_report
from lorenzlab.attractor.levels import LevelStructure
from lorenzlab.attractor.measure import physical_measure
from lorenzlab.errors import CollisionAbort
from lorenzlab.lyapunov.exponents import (
    ExponentTrace,
    derivative_envelope,
    geometric_grid,
    lyapunov_trace,
    trace_agreement,
    truncated_orbit_average,
)
from lorenzlab.lyapunov.integrals import chi_mu_estimate, integrability_report
from lorenzlab.lyapunov.recurrence import recurrence_profile, slow_recurrence, visit_audit, visit_count
from lorenzlab.maps.analysis import fit_nonflat_constants
from lorenzlab.maps.standard import StandardFamilyMap
from lorenzlab.measures.histogram import MeasureHistogram
from lorenzlab.schemas.common import Side


def sample_map() -> StandardFamilyMap:
    return StandardFamilyMap(u=0.8, v=0.7, c=0.5, alpha=2.0)


def test_geometric_grid_is_increasing_and_ends_at_n_max() -> None:
    assert geometric_grid(10) == [1, 2, 3, 4, 5, 6, 8, 10]
    grid = geometric_grid(1_000_000)
    assert grid[-1] == 1_000_000
    assert all(a < b for a, b in zip(grid, grid[1:]))
    with pytest.raises(ValueError):
        geometric_grid(0)


def test_trace_at_fixed_point_is_constant() -> None:
    f = sample_map()
    trace = lyapunov_trace(f, 0.0, n_max=200)
    assert not trace.truncated
    assert trace.values == pytest.approx([math.log(3.2)] * len(trace.values))
    envelope = derivative_envelope(trace)
    assert envelope.log_c_lambda == pytest.approx(math.log(3.2))
    assert truncated_orbit_average(f, 0.0, 50, floor=30.0) == pytest.approx(math.log(3.2))


def test_trace_stops_at_a_collision() -> None:
    f = StandardFamilyMap(u=0.75, v=0.7, c=0.5, alpha=2.0)
    x = f.inverse_branch(0.5, Side.LEFT)
    trace = lyapunov_trace(f, x, n_max=100)
    assert trace.collision_index == 1
    assert trace.ns == [1]


def test_trace_agreement_compares_at_the_common_length() -> None:
    short = ExponentTrace(start="c1-", x=0.0, ns=[1, 10, 100], values=[0.5, 0.2, 0.1])
    long = ExponentTrace(start="c1+", x=1.0, ns=[1, 10, 100, 1000], values=[0.4, 0.3, 0.15, 0.05])
    difference, spread = trace_agreement(short, long)
    assert difference == pytest.approx(0.05)
    assert spread == pytest.approx(0.2)
    assert trace_agreement(long, short) == pytest.approx((difference, spread))


def test_slow_recurrence_of_an_orbit_far_from_c() -> None:
    assert slow_recurrence(sample_map(), 0.0, 0.1, 1000) == 0.0


def test_slow_recurrence_raises_on_collision() -> None:
    f = StandardFamilyMap(u=0.75, v=0.7, c=0.5, alpha=2.0)
    with pytest.raises(CollisionAbort):
        slow_recurrence(f, f.inverse_branch(0.5, Side.LEFT), 0.1, 10)


def test_recurrence_profile_of_critical_orbit(levels: LevelStructure) -> None:
    f = levels.base
    deltas = [1e-2, 5e-3]
    profile = recurrence_profile(
        f,
        f.critical_values[1],
        deltas,
        geometric_grid(2000),
        levels=levels,
        geometry=geometry_report(levels),
    )
    assert all(value <= 0.0 for row in profile.values for value in row)
    assert len(profile.rows()) == len(deltas) * len(profile.ns)
    assert all(bound is not None and bound > 0.0 for bound in profile.bounds)
    assert slow_recurrence(f, f.critical_values[1], 1e-2, 2000) == pytest.approx(profile.values[0][-1])


def test_visit_counts_respect_the_return_time_bound(levels: LevelStructure) -> None:
    f = levels.base
    c1_minus, c1_plus = f.critical_values
    assert visit_count(f, c1_plus, levels, 2, 100) <= 11
    assert visit_count(f, c1_plus, levels, 2, 8) == 0
    assert visit_count(f, c1_plus, levels, 2, 0) == 0
    for x in (c1_minus, c1_plus):
        rows = visit_audit(f, x, levels, [1, 2], geometric_grid(5000))
        assert all(row.ok for row in rows)


def test_truncated_integrals_grow_with_depth(levels: LevelStructure) -> None:
    f = levels.base
    measure = physical_measure(levels, n_bins=2048)
    report = integrability_report(
        f,
        measure,
        levels,
        constants=fit_nonflat_constants(f, 2.0),
        geometry=geometry_report(levels),
    )
    assert report.rows[0].value == 0.0
    assert report.nondecreasing
    assert report.rows[2].increment_bound is not None
    assert report.c2 is not None


def test_chi_of_point_mass_at_fixed_point() -> None:
    f = sample_map()
    estimate = chi_mu_estimate(f, MeasureHistogram.point_mass(0.0, n_bins=4096))
    assert estimate.contains(math.log(3.2))
    assert estimate.value == pytest.approx(math.log(3.2), abs=1e-3)
