import math

import pytest

from lorenzlab.attractor.geometry import geometry_report
from lorenzlab.attractor.levels import LevelStructure, build_levels
from lorenzlab.attractor.measure import birkhoff_measure, physical_measure, window_masses
from lorenzlab.lyapunov.exponents import geometric_grid, lyapunov_trace
from lorenzlab.lyapunov.recurrence import visit_audit
from lorenzlab.maps.restricted import restrict_rescale
from lorenzlab.measures.histogram import w1
from lorenzlab.renorm.tuner import TuningResult, tune_parameters
from lorenzlab.schemas.common import GeometryVerdict
from lorenzlab.stochastic.kernels import NoiseKernel
from lorenzlab.stochastic.shadowing import shadowing_witness
from lorenzlab.stochastic.stability import reference_on_restricted, stability_curve
from lorenzlab.stochastic.stationary import stationary_ulam

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def deep() -> TuningResult:
    return tune_parameters(0.5, 2.0, [(2, 2)] * 4, budget=20_000, tolerance=1e-10, u_range=(0.96, 0.967), v_range=(0.96, 0.967))


@pytest.fixture(scope="module")
def deep_levels(deep: TuningResult) -> LevelStructure:
    return build_levels(deep.map, deep.cascade)


def test_depth_four_cascade(deep: TuningResult, deep_levels: LevelStructure) -> None:
    assert deep.depth >= 4
    assert all(max(record.left_residual, record.right_residual) < 1e-10 for record in deep.cascade)
    assert [record.s for record in deep_levels.levels] == [3, 9, 27, 81]


def test_depth_four_geometry_and_masses(deep_levels: LevelStructure) -> None:
    report = geometry_report(deep_levels)
    assert report.verdict == GeometryVerdict.BOUNDED
    assert report.k_hat < 1e3
    assert all(mass <= bound + 1e-12 for _, mass, bound in window_masses(deep_levels))
    n_bins = 4096
    empirical = birkhoff_measure(deep_levels.base, burn_in=1000, samples=1_000_000, n_bins=n_bins)
    reference = physical_measure(deep_levels, n_bins=n_bins)
    assert w1(empirical, reference) < 4.0 / deep_levels.level(4).s + 2.0 / n_bins


def test_visit_counts_up_to_one_hundred_thousand(deep_levels: LevelStructure) -> None:
    f = deep_levels.base
    for x in f.critical_values:
        rows = visit_audit(f, x, deep_levels, [1, 2, 3, 4], geometric_grid(100_000))
        assert all(row.ok for row in rows)


def test_exponent_at_critical_values_decays(deep_levels: LevelStructure) -> None:
    f = deep_levels.base
    for x in f.critical_values:
        trace = lyapunov_trace(f, x, n_max=1_000_000)
        assert not trace.truncated
        assert trace.last_decade_median() < 0.5 * trace.first_decade_median()


def test_stationary_density_bound_on_fine_grids(deep: TuningResult) -> None:
    g = restrict_rescale(deep.map, 0.02)
    for epsilon in (1e-2, 3e-3, 1e-3):
        kernel = NoiseKernel(epsilon=epsilon)
        _, report = stationary_ulam(g, kernel, math.ceil(5.0 / epsilon))
        assert report.converged
        assert report.max_density <= kernel.d0 / epsilon * 1.1


def test_stability_curve_halves(deep: TuningResult, deep_levels: LevelStructure) -> None:
    g = restrict_rescale(deep.map, 0.02)
    reference = reference_on_restricted(physical_measure(deep_levels, n_bins=4096), g.margin)
    curve = stability_curve(g, reference, [1e-2, 5e-3, 2.5e-3, 1.25e-3])
    assert curve.values()[-1] < curve.values()[0]
    assert curve.shrinks


def test_shadowing_witness_with_full_trials(deep: TuningResult) -> None:
    g = restrict_rescale(deep.map, 0.02)
    report = shadowing_witness(g, [1e-4, 1e-5, 1e-6], trials=1000, seed=0)
    assert report is not None
    assert all(row.pass_fraction == 1.0 and row.first_step_ok for row in report.rows)
