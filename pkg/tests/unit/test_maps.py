import math

import numpy as np
import pytest
from pydantic import ValidationError

from lorenzlab.errors import MarginTooLarge, SingularPointHit
from lorenzlab.maps.analysis import fit_nonflat_constants, nonflat_violations
from lorenzlab.maps.codec import dump_map, load_map
from lorenzlab.maps.restricted import RestrictedMap, restrict_rescale
from lorenzlab.maps.standard import StandardFamilyMap
from lorenzlab.schemas.common import Side


def sample_map() -> StandardFamilyMap:
    return StandardFamilyMap(u=0.8, v=0.7, c=0.5, alpha=2.0)


def test_branch_formulas_match_closed_forms() -> None:
    f = sample_map()
    assert f.eval(0.0) == 0.0
    assert f.eval(1.0) == 1.0
    assert f.eval(0.25) == pytest.approx(0.6, abs=1e-15)
    assert f.critical_values == (0.8, pytest.approx(0.3))
    assert f.eval(0.5, Side.LEFT) == pytest.approx(0.8)
    assert f.eval(0.5, Side.RIGHT) == pytest.approx(0.3)


def test_derivative_values_and_endpoint_expansion() -> None:
    f = sample_map()
    assert f.deriv(0.25) == pytest.approx(1.6)
    assert f.deriv(0.0) == pytest.approx(3.2)
    assert f.deriv(1.0) == pytest.approx(2.8)
    near = [f.deriv(0.5 - 10.0**-k) for k in range(2, 8)]
    assert all(a > b for a, b in zip(near, near[1:]))
    assert f.deriv(0.5, Side.LEFT) == 0.0


def test_eval_at_singular_point_needs_a_side() -> None:
    with pytest.raises(SingularPointHit):
        sample_map().eval(0.5)


def test_log_deriv_sum_along_orbits() -> None:
    f = sample_map()
    assert f.log_deriv_sum(0.25, 0) == 0.0
    assert f.log_deriv_sum(0.0, 3) == pytest.approx(3.0 * math.log(3.2))
    expected = math.log(f.deriv(0.25)) + math.log(f.deriv(0.6))
    assert f.log_deriv_sum(0.25, 2) == pytest.approx(expected)


def test_itinerary_words() -> None:
    f = sample_map()
    assert f.itinerary(0.25, 3).symbols == "010"
    assert f.itinerary(0.0, 5).symbols == "00000"
    assert f.itinerary(0.5, 1, side=Side.RIGHT).symbols == "1"
    collided = f.itinerary(0.5, 3)
    assert collided.collided
    assert collided.defined_up_to == 0


def test_schwarzian_is_negative_everywhere() -> None:
    f = StandardFamilyMap(u=0.95, v=0.9, c=0.4, alpha=3.0)
    xs = np.random.default_rng(3).uniform(0.0, 1.0, size=1000)
    assert all(f.schwarzian(float(x)) < 0.0 for x in xs if abs(x - f.c) > 1e-12)


def test_inverse_branches_undo_the_branches() -> None:
    f = sample_map()
    for x in (0.05, 0.2, 0.45):
        assert f.inverse_branch(f.branch(x, Side.LEFT), Side.LEFT) == pytest.approx(x, abs=1e-12)
    for x in (0.55, 0.8, 0.97):
        assert f.inverse_branch(f.branch(x, Side.RIGHT), Side.RIGHT) == pytest.approx(x, abs=1e-12)


def test_array_evaluation_agrees_with_scalar_branches() -> None:
    f = sample_map()
    xs = np.array([0.0, 0.1, 0.3, 0.6, 0.9, 1.0])
    assert np.allclose(f.eval_array(xs), [f.eval(float(x)) for x in xs], rtol=0.0, atol=1e-15)


def test_orbit_reports_collision_index() -> None:
    f = StandardFamilyMap(u=0.75, v=0.7, c=0.5, alpha=2.0)
    x = f.inverse_branch(0.5, Side.LEFT)
    orbit = f.orbit(x, 10)
    assert orbit.truncated
    assert orbit.collision_index == 1


def test_trivial_maps_are_constructible_but_flagged() -> None:
    trivial = StandardFamilyMap(u=0.45, v=0.7, c=0.5, alpha=2.0)
    assert not trivial.is_nontrivial
    assert sample_map().is_nontrivial


def test_attracting_endpoint_is_rejected() -> None:
    with pytest.raises(ValidationError):
        StandardFamilyMap(u=0.2, v=0.7, c=0.5, alpha=2.0)


def test_restricted_map_values_and_budget() -> None:
    g = restrict_rescale(sample_map(), 0.01)
    f01 = 0.8 * (1.0 - 0.98**2)
    assert g.eval(0.0) == pytest.approx((f01 - 0.01) / 0.98)
    assert g.eval(0.0) == pytest.approx(0.02212, abs=1e-5)
    assert g.singular_point == pytest.approx(0.5)
    assert 0.0 < g.epsilon_budget < 0.5
    assert g.epsilon_budget == pytest.approx(min(g.eval(0.0), 1.0 - g.eval(1.0), 1.0 - g.eval(0.5, Side.LEFT)))


def test_restricted_map_rejects_zero_and_oversized_margins() -> None:
    with pytest.raises(ValueError):
        restrict_rescale(sample_map(), 0.0)
    with pytest.raises((MarginTooLarge, ValidationError)):
        RestrictedMap(base=sample_map(), margin=0.3)


def test_map_text_round_trip_preserves_every_parameter() -> None:
    g = restrict_rescale(sample_map(), 0.01)
    text = dump_map(g)
    assert "family=restricted" in text
    restored = load_map(text)
    assert restored == g


def test_nonflat_constants_hold_on_random_distances() -> None:
    f = sample_map()
    constants = fit_nonflat_constants(f, 2.0)
    assert constants.a < constants.b
    # quadratic branches: Df / |x - c| = 2u/c^2 or 2v/(1-c)^2
    assert constants.a <= 2.0 * 0.7 / 0.25
    assert constants.b >= 2.0 * 0.8 / 0.25
    assert nonflat_violations(f, constants) == 0


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_chain_rule_matches_finite_differences(n: int) -> None:
    f = sample_map()
    h = 1e-6
    checked = 0
    for x in np.random.default_rng(10 + n).uniform(0.0, 1.0, size=100):
        orbit = f.orbit(float(x), n)
        # central differences need the whole orbit away from c
        if not h < x < 1.0 - h or orbit.truncated or np.min(np.abs(orbit.points[:n] - f.c)) < 2e-2:
            continue
        forward = f.orbit(float(x) + h, n).points[-1]
        backward = f.orbit(float(x) - h, n).points[-1]
        numeric = (forward - backward) / (2.0 * h)
        exact = math.exp(f.log_deriv_sum(float(x), n))
        assert abs(numeric - exact) <= 1e-4 * exact
        checked += 1
    assert checked >= 40


@pytest.mark.parametrize("margin", [0.005, 0.01, 0.05])
def test_restricted_itineraries_follow_the_conjugacy(margin: float) -> None:
    f = sample_map()
    g = restrict_rescale(f, margin)
    for x in np.random.default_rng(7).uniform(0.0, 1.0, size=100):
        y = g.to_base(float(x))
        assert g.itinerary(float(x), 10).symbols == f.itinerary(y, 10).symbols
        assert g.eval(float(x)) == pytest.approx(g.from_base(f.eval(y)), abs=1e-14)
