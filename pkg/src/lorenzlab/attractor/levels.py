from __future__ import annotations

from collections.abc import Sequence

from pydantic import Field

from lorenzlab.errors import LevelAuditFailed, NotMonotone, PrecisionCapExceeded, SingularPointHit
from lorenzlab.maps.base import PRECISION_CAP, LorenzMap
from lorenzlab.maps.iterated import ClosedFormMap, IteratedMapDescriptor
from lorenzlab.renorm.types import RenormResult
from lorenzlab.schemas.common import FrozenModel, Side

DIRECT_RETURN_DEPTH = 3

Interval = tuple[float, float]


class LevelRecord(FrozenModel):
    """Depth-n data of the cycle Λ_n, all in base coordinates."""

    depth: int = Field(ge=1)
    p: float
    q: float
    c: float
    a: int = Field(ge=1)
    b: int = Field(ge=1)
    s_minus: int = Field(ge=2)
    s_plus: int = Field(ge=2)
    intervals_minus: list[Interval]
    intervals_plus: list[Interval]
    direct_return: tuple[int, int] | None = None
    monotone: bool = True

    @property
    def width(self) -> float:
        return self.q - self.p

    @property
    def minus_width(self) -> float:
        return self.c - self.p

    @property
    def plus_width(self) -> float:
        return self.q - self.c

    @property
    def s(self) -> int:
        return min(self.s_minus, self.s_plus)

    @property
    def intervals(self) -> list[Interval]:
        return sorted(self.intervals_minus + self.intervals_plus)

    @property
    def total_length(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals_minus + self.intervals_plus)

    def components(self) -> list[Interval]:
        """Intervals of generation n: Λ_n with touching pieces merged (C_n^- and C_n^+ meet at c)."""
        merged: list[list[float]] = []
        for lo, hi in self.intervals:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return [(lo, hi) for lo, hi in merged]

    def contains(self, x: float) -> bool:
        return self.p < x < self.q


class LevelStructure(FrozenModel):
    base: ClosedFormMap = Field(discriminator="family")
    levels: list[LevelRecord]

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def types(self) -> list[tuple[int, int]]:
        return [(record.a, record.b) for record in self.levels]

    def level(self, n: int) -> LevelRecord:
        if not 1 <= n <= self.depth:
            raise IndexError(f"depth {n} outside 1..{self.depth}")
        return self.levels[n - 1]

    def window(self, n: int) -> Interval:
        """C_n with the convention C_0 = [0, 1]."""
        if n == 0:
            return 0.0, 1.0
        record = self.level(n)
        return record.p, record.q


def return_times(types: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """S_n^± from S_1 = (a_1 + 1, b_1 + 1) and S_{n+1}^- = S_n^- + a S_n^+, S_{n+1}^+ = b S_n^- + S_n^+."""
    times: list[tuple[int, int]] = []
    s_minus, s_plus = 1, 1
    for a, b in types:
        s_minus, s_plus = s_minus + a * s_plus, b * s_minus + s_plus
        times.append((s_minus, s_plus))
    return times


def first_return_time(lmap: LorenzMap, x: float, window: Interval, side: Side, max_steps: int) -> int:
    """Steps until the natural orbit of x re-enters the open window; the first step uses `side`."""
    lo, hi = window
    current = lmap.branch(x, side)
    for step in range(1, max_steps + 1):
        if lo < current < hi:
            return step
        current = lmap.eval(current)
    raise LevelAuditFailed(0, f"no return of {x!r} to {window} within {max_steps} steps")


def cycle_intervals(lmap: LorenzMap, lo: float, hi: float, word: str) -> list[Interval]:
    """Closures f^k([lo, hi]) for 0 <= k < len(word), branches forced along `word`."""
    intervals = [(lo, hi)]
    for symbol in word[:-1]:
        side = Side.LEFT if symbol == "0" else Side.RIGHT
        lo, hi = lmap.branch(lo, side), lmap.branch(hi, side)
        intervals.append((lo, hi))
    return intervals


def _audit_disjoint(depth: int, intervals: list[Interval]) -> None:
    ordered = sorted(intervals)
    for (lo1, hi1), (lo2, hi2) in zip(ordered, ordered[1:]):
        if lo2 < hi1:
            raise LevelAuditFailed(depth, f"cycle intervals ({lo1!r}, {hi1!r}) and ({lo2!r}, {hi2!r}) overlap")


def _level_from_result(base: ClosedFormMap, result: RenormResult, depth: int) -> LevelRecord:
    descriptor: IteratedMapDescriptor = result.renormalized
    if descriptor.depth != depth:
        raise LevelAuditFailed(depth, f"cascade entry has depth {descriptor.depth}")
    p, q = descriptor.window
    c = base.singular_point
    if q - p < PRECISION_CAP:
        raise PrecisionCapExceeded(depth, q - p)
    intervals_minus = cycle_intervals(base, p, c, descriptor.left_word)
    intervals_plus = cycle_intervals(base, c, q, descriptor.right_word)
    direct = None
    if depth <= DIRECT_RETURN_DEPTH:
        limit = 4 * max(descriptor.left_time, descriptor.right_time)
        try:
            direct = (
                first_return_time(base, 0.5 * (p + c), (p, q), Side.LEFT, limit),
                first_return_time(base, 0.5 * (c + q), (p, q), Side.RIGHT, limit),
            )
        except SingularPointHit as exc:
            raise LevelAuditFailed(depth, f"first-return check hit the singular point: {exc}") from exc
    return LevelRecord(
        depth=depth,
        p=p,
        q=q,
        c=c,
        a=result.type.a,
        b=result.type.b,
        s_minus=descriptor.left_time,
        s_plus=descriptor.right_time,
        intervals_minus=intervals_minus,
        intervals_plus=intervals_plus,
        direct_return=direct,
        monotone=result.type.is_monotone,
    )


def build_levels(base: ClosedFormMap, cascade: Sequence[RenormResult]) -> LevelStructure:
    """Level structure C_1 ⊃ C_2 ⊃ ... of a certified cascade of `base`.

    Each level is audited: the return times from the recursion must equal
    the word lengths (and the directly simulated first returns up to depth
    three), S_n^± >= 2^n, windows must nest, and the cycle intervals of
    monotone combinatorics must have disjoint interiors.
    """
    records: list[LevelRecord] = []
    types = [(result.type.a, result.type.b) for result in cascade]
    for depth, (result, expected) in enumerate(zip(cascade, return_times(types)), start=1):
        if not result.type.is_monotone:
            raise NotMonotone(f"level {depth} has non-monotone type {result.type.label()}")
        record = _level_from_result(base, result, depth)
        if (record.s_minus, record.s_plus) != expected:
            raise LevelAuditFailed(depth, f"return times {(record.s_minus, record.s_plus)} differ from recursion {expected}")
        if record.direct_return is not None and record.direct_return != expected:
            raise LevelAuditFailed(depth, f"first returns {record.direct_return} differ from recursion {expected}")
        if record.s < 2**depth:
            raise LevelAuditFailed(depth, f"S_n = {record.s} below 2^n")
        if records and not (records[-1].p <= record.p < record.c < record.q <= records[-1].q):
            raise LevelAuditFailed(depth, "windows are not nested")
        _audit_disjoint(depth, record.intervals_minus + record.intervals_plus)
        records.append(record)
    return LevelStructure(base=base, levels=records)
