from __future__ import annotations

from dataclasses import dataclass

from lorenzlab.errors import DegenerateWindow, NoRootInBranch, NoSuchBranch, NotRenormalizable
from lorenzlab.maps.base import PRECISION_CAP, LorenzMap, iterate_word
from lorenzlab.maps.iterated import IteratedMapDescriptor
from lorenzlab.maps.restricted import RestrictedMap
from lorenzlab.maps.standard import StandardFamilyMap
from lorenzlab.schemas.common import RenormFailure, Side

from .branches import DEFAULT_RESIDUAL_TOL, find_periodic_boundary, locate_branch, periodic_residual
from .types import CombinatorialType, RenormResult


def residual_tolerance(lmap: LorenzMap) -> float:
    """1e-12 relaxed by a factor 10 per renormalization level of the result."""
    depth = lmap.depth if isinstance(lmap, IteratedMapDescriptor) else 0
    return DEFAULT_RESIDUAL_TOL * 10.0 ** (depth + 1)


def _orbit_intervals(lmap: LorenzMap, left: float, right: float, word: str) -> list[tuple[float, float]]:
    """Closures of f^i([left, right]) for 1 <= i < len(word), iterating both ends along `word`."""
    intervals = []
    lo, hi = left, right
    for symbol in word[:-1]:
        side = Side.LEFT if symbol == "0" else Side.RIGHT
        lo, hi = lmap.branch(lo, side), lmap.branch(hi, side)
        intervals.append((lo, hi))
    return intervals


def _overlaps(first: tuple[float, float], second: tuple[float, float]) -> bool:
    return first[0] <= second[1] and second[0] <= first[1]


def _first_overlap(intervals: list[tuple[float, float]], window: tuple[float, float]) -> str | None:
    for index, interval in enumerate(intervals, start=1):
        if _overlaps(interval, window):
            return f"image {index} {interval} meets C {window}"
    for i, first in enumerate(intervals):
        for j in range(i + 1, len(intervals)):
            if _overlaps(first, intervals[j]):
                return f"images {i + 1} and {j + 1} overlap"
    return None


def renormalize_window(lmap: LorenzMap, window: tuple[float, float], ctype: CombinatorialType) -> IteratedMapDescriptor:
    if isinstance(lmap, IteratedMapDescriptor):
        descriptor = lmap.refine(window, ctype.omega_minus, ctype.omega_plus)
    elif isinstance(lmap, StandardFamilyMap | RestrictedMap):
        descriptor = IteratedMapDescriptor(
            base=lmap,
            window=window,
            left_word=ctype.omega_minus,
            right_word=ctype.omega_plus,
            depth=1,
        )
    else:
        raise TypeError(f"cannot renormalize {type(lmap).__name__}")
    if descriptor.width < PRECISION_CAP:
        raise DegenerateWindow(descriptor.width, PRECISION_CAP)
    return descriptor


def find_renorm_interval(
    lmap: LorenzMap,
    a: int,
    b: int,
    residual_tol: float | None = None,
) -> RenormResult:
    ctype = CombinatorialType.monotone(a, b)
    tolerance = residual_tolerance(lmap) if residual_tol is None else residual_tol
    c = lmap.singular_point
    if not lmap.is_nontrivial:
        raise NotRenormalizable(RenormFailure.TRIVIAL_MAP, f"critical values {lmap.critical_values} do not straddle c")

    try:
        locate_branch(lmap, ctype.omega_minus)
        locate_branch(lmap, ctype.omega_plus)
    except NoSuchBranch as exc:
        raise NotRenormalizable(RenormFailure.BRANCH_MISSING, str(exc)) from exc

    left_return = iterate_word(lmap, c, ctype.omega_minus)
    right_return = iterate_word(lmap, c, ctype.omega_plus)
    if not (left_return > c and right_return < c):
        raise NotRenormalizable(
            RenormFailure.NON_TRIVIALITY,
            f"returns Pf(c-)={left_return!r}, Pf(c+)={right_return!r} do not straddle c={c!r}",
        )

    try:
        p = find_periodic_boundary(lmap, ctype.omega_minus, residual_tol=float("inf"))
        q = find_periodic_boundary(lmap, ctype.omega_plus, residual_tol=float("inf"))
    except NoRootInBranch as exc:
        raise NotRenormalizable(RenormFailure.ROOT_MISSING, str(exc)) from exc

    if not p < c < q:
        raise NotRenormalizable(RenormFailure.CONTAINMENT, f"window ({p!r}, {q!r}) misses c")
    if left_return > q or right_return < p:
        raise NotRenormalizable(
            RenormFailure.RETURN_CONDITION,
            f"returns {left_return!r}, {right_return!r} leave C=({p!r}, {q!r})",
        )
    p0, q0 = lmap.inverse_branch(c, Side.LEFT), lmap.inverse_branch(c, Side.RIGHT)
    if p < p0 or q > q0:
        raise NotRenormalizable(RenormFailure.CONTAINMENT, f"C=({p!r}, {q!r}) not inside [{p0!r}, {q0!r}]")

    window = (p, q)
    overlap = _first_overlap(_orbit_intervals(lmap, p, c, ctype.omega_minus), window) or _first_overlap(
        _orbit_intervals(lmap, c, q, ctype.omega_plus), window
    )
    if overlap is not None:
        raise NotRenormalizable(RenormFailure.DISJOINTNESS, overlap)

    left_residual = periodic_residual(lmap, p, ctype.omega_minus)
    right_residual = periodic_residual(lmap, q, ctype.omega_plus)
    if max(left_residual, right_residual) >= tolerance:
        raise NotRenormalizable(
            RenormFailure.RESIDUAL,
            f"residuals {left_residual!r}, {right_residual!r} above {tolerance!r}",
        )

    return RenormResult(
        window=window,
        times=(len(ctype.omega_minus), len(ctype.omega_plus)),
        type=ctype,
        renormalized=renormalize_window(lmap, window, ctype),
        left_residual=left_residual,
        right_residual=right_residual,
    )


def renormalize(lmap: LorenzMap, result: RenormResult) -> IteratedMapDescriptor:
    return renormalize_window(lmap, result.window, result.type)


@dataclass(frozen=True)
class PreRenormalization:
    """First return map Pf on C: f^(a+1) left of c and f^(b+1) right of it."""

    source: LorenzMap
    window: tuple[float, float]
    ctype: CombinatorialType

    def __call__(self, x: float, side: Side | None = None) -> float:
        chosen = self.source.side_of(x, side)
        word = self.ctype.omega_minus if chosen == Side.LEFT else self.ctype.omega_plus
        return iterate_word(self.source, x, word)

    def contains(self, x: float) -> bool:
        return self.window[0] <= x <= self.window[1]


def prerenormalization(lmap: LorenzMap, result: RenormResult) -> PreRenormalization:
    return PreRenormalization(source=lmap, window=result.window, ctype=result.type)


def monotone_types(max_len: int) -> list[tuple[int, int]]:
    """Monotone (a, b) with |ω-|+|ω+| <= max_len, smallest a+b first, then smallest a."""
    types = []
    for total in range(2, max_len - 1):
        for a in range(1, total):
            types.append((a, total - a))
    return types


def detect_renormalization(lmap: LorenzMap, max_len: int) -> RenormResult:
    if not lmap.is_nontrivial:
        raise NotRenormalizable(RenormFailure.TRIVIAL_MAP, f"critical values {lmap.critical_values} do not straddle c")
    attempts: dict[str, str] = {}
    for a, b in monotone_types(max_len):
        try:
            return find_renorm_interval(lmap, a, b)
        except NotRenormalizable as exc:
            attempts[f"({a},{b})"] = exc.reason.value
    raise NotRenormalizable(
        RenormFailure.NO_TYPE_WITHIN_BUDGET,
        f"no monotone type with total word length <= {max_len}",
        attempts=attempts,
    )


def detect_type(lmap: LorenzMap, max_len: int) -> CombinatorialType:
    return detect_renormalization(lmap, max_len).type


def detect_cascade(lmap: LorenzMap, depth: int, max_len: int) -> list[RenormResult]:
    """Successive smallest-type renormalizations of a given map."""
    cascade: list[RenormResult] = []
    current: LorenzMap = lmap
    for _ in range(depth):
        result = detect_renormalization(current, max_len)
        cascade.append(result)
        current = result.renormalized
    return cascade
