from __future__ import annotations

import heapq
import math
from collections.abc import Sequence
from concurrent.futures import Executor
from dataclasses import dataclass

from pydantic import Field, ValidationError

from lorenzlab.errors import LorenzLabError, TuningFailed
from lorenzlab.logging.jsonl import JsonlWriter
from lorenzlab.maps.base import LorenzMap
from lorenzlab.maps.standard import StandardFamilyMap
from lorenzlab.schemas.common import FrozenModel
from lorenzlab.utils.parallel import pool_map, worker_pool

from .interval import detect_renormalization, find_renorm_interval
from .types import RenormResult

DEFAULT_BUDGET = 100_000
DEFAULT_TOLERANCE = 1e-10
PROGRESS_EVERY = 200

TargetTypes = tuple[tuple[int, int], ...]


@dataclass(frozen=True, order=True)
class Rectangle:
    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float

    @property
    def center(self) -> tuple[float, float]:
        return 0.5 * (self.u_lo + self.u_hi), 0.5 * (self.v_lo + self.v_hi)

    @property
    def diameter(self) -> float:
        return math.hypot(self.u_hi - self.u_lo, self.v_hi - self.v_lo)

    @property
    def area(self) -> float:
        return (self.u_hi - self.u_lo) * (self.v_hi - self.v_lo)

    def quadrants(self) -> list[Rectangle]:
        u_mid, v_mid = self.center
        return [
            Rectangle(self.u_lo, u_mid, self.v_lo, v_mid),
            Rectangle(u_mid, self.u_hi, self.v_lo, v_mid),
            Rectangle(self.u_lo, u_mid, v_mid, self.v_hi),
            Rectangle(u_mid, self.u_hi, v_mid, self.v_hi),
        ]

    def core(self) -> Rectangle:
        """Half-size rectangle with the same centre."""
        u_mid, v_mid = self.center
        du = 0.25 * (self.u_hi - self.u_lo)
        dv = 0.25 * (self.v_hi - self.v_lo)
        return Rectangle(u_mid - du, u_mid + du, v_mid - dv, v_mid + dv)


class TuningResult(FrozenModel):
    u: float
    v: float
    c: float
    alpha: float
    diameter: float = Field(ge=0.0)
    depth: int = Field(ge=0)
    certifications: int = Field(ge=0)
    combinatorics_hint: tuple[int, int]
    cascade: list[RenormResult] = Field(default_factory=list)

    @property
    def map(self) -> StandardFamilyMap:
        return StandardFamilyMap(u=self.u, v=self.v, c=self.c, alpha=self.alpha)


def combinatorics_window(alpha: float) -> tuple[int, int]:
    """[alpha] <= a <= [2 alpha - 1], the range with known a priori bounds."""
    return math.floor(alpha), math.floor(2.0 * alpha - 1.0)


def certify_cascade(lmap: LorenzMap, target: Sequence[tuple[int, int]]) -> list[RenormResult]:
    """Longest prefix of `target` along which `lmap` renormalizes."""
    cascade: list[RenormResult] = []
    current = lmap
    for a, b in target:
        try:
            result = find_renorm_interval(current, a, b)
        except LorenzLabError:
            break
        cascade.append(result)
        current = result.renormalized
    return cascade


def certified_depth(task: tuple[float, float, float, float, TargetTypes]) -> int:
    u, v, c, alpha, target = task
    try:
        lmap = StandardFamilyMap(u=u, v=v, c=c, alpha=alpha)
    except ValidationError:
        return 0
    return len(certify_cascade(lmap, target))


def detect_certificate(lmap: LorenzMap, target: Sequence[tuple[int, int]]) -> list[RenormResult]:
    """Re-derive each level with the smallest-type search and require the target type."""
    cascade: list[RenormResult] = []
    current = lmap
    for a, b in target:
        try:
            result = detect_renormalization(current, a + b + 2)
        except LorenzLabError:
            break
        if (result.type.a, result.type.b) != (a, b):
            break
        cascade.append(result)
        current = result.renormalized
    return cascade


class _Scorer:
    def __init__(self, pool: Executor | None, c: float, alpha: float, target: TargetTypes) -> None:
        self.pool = pool
        self.c = c
        self.alpha = alpha
        self.target = target
        self.certifications = 0

    def __call__(self, rectangles: list[Rectangle]) -> list[int]:
        self.certifications += len(rectangles)
        tasks = [(*rect.center, self.c, self.alpha, self.target) for rect in rectangles]
        return pool_map(self.pool, certified_depth, tasks)


def _search(scorer: _Scorer, root: Rectangle, ceiling: int, budget: int, writer: JsonlWriter | None) -> tuple[int, Rectangle]:
    """Best-first subdivision; higher centre depth first, larger area on ties."""
    root_score = scorer([root])[0]
    counter = 0
    heap: list[tuple[int, float, int, Rectangle]] = [(-root_score, -root.area, counter, root)]
    best_score, best = root_score, root
    subdivisions = 0
    while heap and best_score < ceiling and scorer.certifications < budget:
        neg_score, _, _, rect = heapq.heappop(heap)
        parent_score = -neg_score
        children = rect.quadrants()
        scores = scorer(children)
        if max(scores) < parent_score:
            # quadrant centres all lost depth; keep a smaller rectangle around the certified centre
            children.append(rect.core())
            scores.append(parent_score)
        for child, child_score in zip(children, scores):
            counter += 1
            heapq.heappush(heap, (-child_score, -child.area, counter, child))
            if child_score > best_score:
                best_score, best = child_score, child
        subdivisions += 1
        if writer is not None and subdivisions % PROGRESS_EVERY == 0:
            _log_progress(writer, scorer.certifications, best_score, best)
    return best_score, best


def _zoom(scorer: _Scorer, best: Rectangle, best_score: int, tolerance: float) -> tuple[int, Rectangle]:
    while best.diameter > tolerance:
        children = best.quadrants()
        scores = scorer(children)
        top = max(range(len(children)), key=lambda index: scores[index])
        if scores[top] >= best_score:
            best_score, best = scores[top], children[top]
        else:
            best = best.core()
    return best_score, best


def tune_parameters(
    c: float,
    alpha: float,
    target: Sequence[tuple[int, int]],
    *,
    budget: int = DEFAULT_BUDGET,
    tolerance: float = DEFAULT_TOLERANCE,
    extra_depth: int = 0,
    u_range: tuple[float, float] | None = None,
    v_range: tuple[float, float] | None = None,
    threads: int | None = None,
    writer: JsonlWriter | None = None,
) -> TuningResult:
    """Search (u, v) for a map renormalizable with the target types.

    Rectangles in parameter space are scored by the depth certified at
    their centre. Subdivision continues until the target depth (plus
    `extra_depth` if the budget allows) is reached, then the best
    rectangle is zoomed down to `tolerance` without ever dropping below
    the certified depth. The returned cascade is re-derived by the
    smallest-type search at every level.
    """
    required: TargetTypes = tuple((int(a), int(b)) for a, b in target)
    hint = combinatorics_window(alpha)
    if not required:
        u0 = 0.5 * (c + 1.0) if u_range is None else 0.5 * (u_range[0] + u_range[1])
        v0 = 0.5 * (2.0 - c) if v_range is None else 0.5 * (v_range[0] + v_range[1])
        return TuningResult(u=u0, v=v0, c=c, alpha=alpha, diameter=0.0, depth=0, certifications=0, combinatorics_hint=hint)

    extended = required + (required[-1],) * extra_depth
    goal = len(required)
    root = Rectangle(*(u_range or (c, 1.0)), *(v_range or (1.0 - c, 1.0)))

    with worker_pool(threads) as pool:
        scorer = _Scorer(pool, c, alpha, extended)
        best_score, best = _search(scorer, root, len(extended), budget, writer)
        if best_score < goal:
            u_best, v_best = best.center
            partial = _safe_cascade(u_best, v_best, c, alpha, required)
            raise TuningFailed(best_score, partial, (u_best, v_best), scorer.certifications)
        best_score, best = _zoom(scorer, best, best_score, tolerance)

    u_star, v_star = best.center
    cascade = detect_certificate(StandardFamilyMap(u=u_star, v=v_star, c=c, alpha=alpha), extended)
    if len(cascade) < goal:
        raise TuningFailed(len(cascade), cascade, (u_star, v_star), scorer.certifications)
    result = TuningResult(
        u=u_star,
        v=v_star,
        c=c,
        alpha=alpha,
        diameter=best.diameter,
        depth=len(cascade),
        certifications=scorer.certifications,
        combinatorics_hint=hint,
        cascade=cascade,
    )
    if writer is not None:
        writer.event("tune_finished", **result.model_dump(mode="json", exclude={"cascade"}))
    return result


def _safe_cascade(u: float, v: float, c: float, alpha: float, target: Sequence[tuple[int, int]]) -> list[RenormResult]:
    try:
        return certify_cascade(StandardFamilyMap(u=u, v=v, c=c, alpha=alpha), target)
    except ValidationError:
        return []


def _log_progress(writer: JsonlWriter, certifications: int, best_score: int, best: Rectangle) -> None:
    u, v = best.center
    writer.event(
        "tune_progress",
        certifications=certifications,
        best_depth=best_score,
        u=u,
        v=v,
        diameter=best.diameter,
    )
