from __future__ import annotations

import math

from pydantic import Field

from lorenzlab.errors import LevelAuditFailed
from lorenzlab.schemas.common import FrozenModel, GeometryVerdict

from .levels import Interval, LevelRecord, LevelStructure

DEFAULT_RATIO_FLOOR = 1e-3
DEFAULT_K_CAP = 1e3
CONTAINMENT_RTOL = 1e-9


class LevelGeometry(FrozenModel):
    """Ratios between generation n and generation n + 1 of the cycles."""

    depth: int = Field(ge=1)
    child_ratio_min: float
    child_ratio_max: float
    gap_ratio_min: float | None
    gap_ratio_max: float | None
    branch_ratio_minus: float
    branch_ratio_plus: float
    shrink_minus: float
    shrink_plus: float
    children_in_window: int
    expected_children: int
    total_length: float
    next_total_length: float

    @property
    def branch_ratio(self) -> float:
        return max(self.branch_ratio_minus, self.branch_ratio_plus)

    @property
    def children_ok(self) -> bool:
        return self.children_in_window == self.expected_children

    @property
    def length_ratio(self) -> float:
        return self.next_total_length / self.total_length


class GeometryReport(FrozenModel):
    levels: list[LevelGeometry]
    mu_hat: float
    lambda_hat: float
    k_hat: float
    rho_hat: float
    c1_hat: float
    ratio_floor: float
    k_cap: float
    verdict: GeometryVerdict
    audited_depth: int
    bounded_combinatorics: bool

    @property
    def is_bounded(self) -> bool:
        return self.verdict == GeometryVerdict.BOUNDED

    def recurrence_bound(self, k0: int) -> float:
        """-log ρ Σ_{k>=k0} (k+1)/2^(k-1) - log C₁ Σ_{k>=k0} 2^(1-k), summed in closed form."""
        scale = 2.0 ** (2 - k0)
        return scale * (-(k0 + 2) * math.log(self.rho_hat) - math.log(self.c1_hat))


def _children(parent: Interval, candidates: list[Interval], depth: int) -> list[Interval]:
    lo, hi = parent
    slack = CONTAINMENT_RTOL * (hi - lo)
    inside = []
    for child in candidates:
        mid = 0.5 * (child[0] + child[1])
        if lo <= mid <= hi:
            if child[0] < lo - slack or child[1] > hi + slack:
                raise LevelAuditFailed(depth + 1, f"interval {child} sticks out of {parent}")
            inside.append((max(child[0], lo), min(child[1], hi)))
    return sorted(inside)


def _gaps(parent: Interval, children: list[Interval]) -> list[float]:
    edges = [parent[0]]
    for lo, hi in children:
        edges.extend((lo, hi))
    edges.append(parent[1])
    lengths = [edges[i + 1] - edges[i] for i in range(0, len(edges), 2)]
    return [length for length in lengths if length > 0.0]


def level_geometry(current: LevelRecord, following: LevelRecord) -> LevelGeometry:
    candidates = following.components()
    child_ratios: list[float] = []
    gap_ratios: list[float] = []
    children_in_window = 0
    for parent in current.components():
        length = parent[1] - parent[0]
        if length <= 0.0:
            raise LevelAuditFailed(current.depth, f"degenerate interval {parent}")
        children = _children(parent, candidates, current.depth)
        if not children:
            raise LevelAuditFailed(current.depth, f"interval {parent} has no children")
        child_ratios.extend((hi - lo) / length for lo, hi in children)
        gap_ratios.extend(gap / length for gap in _gaps(parent, children))
        if parent[0] <= current.c <= parent[1]:
            children_in_window = len(children)
    return LevelGeometry(
        depth=current.depth,
        child_ratio_min=min(child_ratios),
        child_ratio_max=max(child_ratios),
        gap_ratio_min=min(gap_ratios) if gap_ratios else None,
        gap_ratio_max=max(gap_ratios) if gap_ratios else None,
        branch_ratio_minus=current.width / current.minus_width,
        branch_ratio_plus=current.width / current.plus_width,
        shrink_minus=following.minus_width / current.minus_width,
        shrink_plus=following.plus_width / current.plus_width,
        children_in_window=children_in_window,
        expected_children=following.a + following.b + 1,
        total_length=current.total_length,
        next_total_length=following.total_length,
    )


def geometry_report(
    levels: LevelStructure,
    ratio_floor: float = DEFAULT_RATIO_FLOOR,
    k_cap: float = DEFAULT_K_CAP,
) -> GeometryReport:
    """Bounded-geometry audit over depths 1..N-1 of a level structure.

    μ̂ is the smallest child or gap ratio, λ̂ the largest, K̂ the largest
    |C_n|/|C_n^±|. ρ̂ and Ĉ₁ satisfy |C_k^±| >= Ĉ₁ ρ̂^k at every audited k.
    The verdict holds only for the audited depth.
    """
    if levels.depth < 2:
        raise ValueError("geometry needs a level structure of depth >= 2")
    records = levels.levels
    per_level = [level_geometry(current, following) for current, following in zip(records, records[1:])]

    lows = [item.child_ratio_min for item in per_level] + [
        item.gap_ratio_min for item in per_level if item.gap_ratio_min is not None
    ]
    highs = [item.child_ratio_max for item in per_level] + [
        item.gap_ratio_max for item in per_level if item.gap_ratio_max is not None
    ]
    mu_hat, lambda_hat = min(lows), max(highs)
    k_hat = max(max(item.branch_ratio for item in per_level), records[-1].width / min(records[-1].minus_width, records[-1].plus_width))
    rho_hat = min(min(item.shrink_minus, item.shrink_plus) for item in per_level)
    c1_hat = min(
        min(record.minus_width, record.plus_width) / rho_hat**record.depth for record in records
    )
    longest_words = max(record.a + record.b + 2 for record in records)
    bounded_combinatorics = longest_words <= 2.0 / mu_hat + 1.0

    bounded = (
        mu_hat > ratio_floor
        and lambda_hat < 1.0 - ratio_floor
        and k_hat < k_cap
        and all(item.children_ok for item in per_level)
        and all(item.next_total_length < item.total_length for item in per_level)
    )
    return GeometryReport(
        levels=per_level,
        mu_hat=mu_hat,
        lambda_hat=lambda_hat,
        k_hat=k_hat,
        rho_hat=rho_hat,
        c1_hat=min(c1_hat, 1.0),
        ratio_floor=ratio_floor,
        k_cap=k_cap,
        verdict=GeometryVerdict.BOUNDED if bounded else GeometryVerdict.UNBOUNDED,
        audited_depth=levels.depth,
        bounded_combinatorics=bounded_combinatorics,
    )
