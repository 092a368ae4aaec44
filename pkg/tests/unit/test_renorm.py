import json
from pathlib import Path

import numpy as np
import pytest

from lorenzlab.errors import NotRenormalizable, TuningFailed
from lorenzlab.logging.jsonl import JsonlWriter
from lorenzlab.maps.base import iterate_word
from lorenzlab.maps.standard import StandardFamilyMap
from lorenzlab.renorm.branches import find_periodic_boundary, periodic_residual
from lorenzlab.renorm.interval import (
    detect_type,
    find_renorm_interval,
    monotone_types,
    prerenormalization,
    renormalize,
)
from lorenzlab.renorm.tuner import (
    PROGRESS_EVERY,
    Rectangle,
    TuningResult,
    _search,
    combinatorics_window,
    tune_parameters,
)
from lorenzlab.renorm.types import CombinatorialType
from lorenzlab.schemas.common import RenormFailure, Side


def test_monotone_words_and_labels() -> None:
    ctype = CombinatorialType.monotone(2, 3)
    assert ctype.omega_minus == "011"
    assert ctype.omega_plus == "1000"
    assert ctype.is_monotone
    assert ctype.label() == "(2,3)"
    assert ctype.total_length == 7
    with pytest.raises(ValueError):
        CombinatorialType.monotone(0, 2)


def test_monotone_types_are_ordered_by_total_length() -> None:
    types = monotone_types(6)
    assert types[0] == (1, 1)
    assert types[:3] == [(1, 1), (1, 2), (2, 1)]
    assert max(a + b + 2 for a, b in types) <= 6


def test_combinatorics_window_for_quadratic_critical_order() -> None:
    assert combinatorics_window(2.0) == (2, 3)


def test_fixed_endpoints_are_the_one_letter_periodic_points() -> None:
    f = StandardFamilyMap(u=0.8, v=0.7, c=0.5, alpha=2.0)
    assert find_periodic_boundary(f, "0") == 0.0
    assert find_periodic_boundary(f, "1") == 1.0


def test_tuned_map_renormalizes_with_type_2_2(tuned: TuningResult) -> None:
    f = tuned.map
    result = find_renorm_interval(f, 2, 2)
    p, q = result.window
    assert p < f.c < q
    assert result.times == (3, 3)
    assert periodic_residual(f, p, "011") < 1e-12
    assert periodic_residual(f, q, "100") < 1e-12
    assert iterate_word(f, p, "011") == pytest.approx(p, abs=1e-12)
    assert detect_type(f, 6) == CombinatorialType.monotone(2, 2)


def test_intermediate_images_avoid_the_window(tuned: TuningResult) -> None:
    f = tuned.map
    p, q = find_renorm_interval(f, 2, 2).window
    lo, hi = p, f.c
    for symbol in "01":
        side = Side.LEFT if symbol == "0" else Side.RIGHT
        lo, hi = f.branch(lo, side), f.branch(hi, side)
        assert hi < p or lo > q


def test_prerenormalization_matches_direct_iteration(tuned: TuningResult) -> None:
    f = tuned.map
    result = find_renorm_interval(f, 2, 2)
    pf = prerenormalization(f, result)
    p, q = result.window
    assert pf(p, Side.LEFT) == pytest.approx(p, abs=1e-12)
    assert pf(f.c, Side.LEFT) == iterate_word(f, f.critical_values[0], "11")
    points = np.random.default_rng(5).uniform(p, f.c, size=100)
    for x in points:
        assert pf(float(x)) == iterate_word(f, float(x), "011")


def test_renormalized_map_fixes_zero_and_is_conjugate(tuned: TuningResult) -> None:
    f = tuned.map
    result = find_renorm_interval(f, 2, 2)
    rf = renormalize(f, result)
    assert rf.eval(0.0) == pytest.approx(0.0, abs=1e-10)
    p, q = result.window
    x = 0.3
    if abs(x - rf.singular_point) > 1e-3:
        expected = (prerenormalization(f, result)(p + (q - p) * x) - p) / (q - p)
        assert rf.eval(x) == pytest.approx(expected, abs=1e-12)
    assert rf.schwarzian(0.3) < 0.0


def test_tuner_certifies_two_levels(tuned: TuningResult) -> None:
    assert tuned.depth >= 2
    assert [(record.type.a, record.type.b) for record in tuned.cascade[:2]] == [(2, 2), (2, 2)]
    assert tuned.diameter <= 1e-8
    assert 0.962 <= tuned.u <= 0.965


def test_trivial_map_is_not_renormalizable() -> None:
    trivial = StandardFamilyMap(u=0.45, v=0.7, c=0.5, alpha=2.0)
    with pytest.raises(NotRenormalizable) as excinfo:
        detect_type(trivial, 8)
    assert excinfo.value.reason == RenormFailure.TRIVIAL_MAP


def test_empty_target_accepts_any_nontrivial_map() -> None:
    result = tune_parameters(0.5, 2.0, [])
    assert result.depth == 0
    assert result.map.is_nontrivial


def test_tiny_budget_reports_partial_tuning() -> None:
    with pytest.raises(TuningFailed) as excinfo:
        tune_parameters(0.5, 2.0, [(2, 2)] * 3, budget=1)
    assert excinfo.value.depth < 3
    assert "depth" in str(excinfo.value)


@pytest.mark.parametrize("level", [0, 1])
def test_renormalized_map_matches_first_return_iteration(tuned: TuningResult, level: int) -> None:
    f = tuned.map
    record = tuned.cascade[level]
    rf = record.renormalized
    p, q = record.base_window
    s_minus, s_plus = len(rf.left_word), len(rf.right_word)
    checked = 0
    for x in np.random.default_rng(20 + level).uniform(0.0, 1.0, size=100):
        if abs(x - rf.singular_point) < 1e-6:
            continue
        y = p + (q - p) * float(x)
        steps = s_minus if y < f.c else s_plus
        expected = (f.orbit(y, steps).points[-1] - p) / (q - p)
        assert rf.eval(float(x)) == pytest.approx(expected, rel=1e-10, abs=1e-12)
        checked += 1
    assert checked >= 95


class FlatScorer:
    """Every centre certifies depth zero, so each subdivision costs four certifications."""

    def __init__(self) -> None:
        self.certifications = 0

    def __call__(self, rectangles: list[Rectangle]) -> list[int]:
        self.certifications += len(rectangles)
        return [0] * len(rectangles)


def test_search_logs_progress_once_per_fixed_number_of_subdivisions(tmp_path: Path) -> None:
    writer = JsonlWriter(tmp_path / "events.jsonl")
    scorer = FlatScorer()
    budget = 1 + 4 * 3 * PROGRESS_EVERY
    depth, _ = _search(scorer, Rectangle(0.9, 1.0, 0.9, 1.0), ceiling=1, budget=budget, writer=writer)
    assert depth == 0
    assert scorer.certifications == budget
    events = [json.loads(line) for line in (tmp_path / "events.jsonl").read_text(encoding="utf-8").splitlines()]
    assert [event["event"] for event in events] == ["tune_progress"] * 3
    assert [event["certifications"] for event in events] == [1 + 4 * k * PROGRESS_EVERY for k in (1, 2, 3)]
