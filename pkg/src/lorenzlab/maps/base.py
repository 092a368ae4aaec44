from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import bisect

from lorenzlab.errors import DerivativeUnderflow, NoSuchBranch, SingularPointHit
from lorenzlab.schemas.common import Side

COLLISION_TOL = 1e-14
PRECISION_CAP = 1e3 * float(np.finfo(float).eps)
BISECT_RTOL = 4.0 * float(np.finfo(float).eps)
BISECT_XTOL = 1e-300
BISECT_MAXITER = 400


@dataclass(frozen=True)
class Orbit:
    """Forward orbit x_0..x_k; `collision_index` is the step that landed on c, if any."""

    points: np.ndarray
    collision_index: int | None = None

    @property
    def truncated(self) -> bool:
        return self.collision_index is not None

    def __len__(self) -> int:
        return int(self.points.shape[0])


class ItineraryWord(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    symbols: str
    collided: bool = False

    @property
    def defined_up_to(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return self.symbols + ("|" if self.collided else "")


class LorenzMap(BaseModel, ABC):
    """Increasing interval map with one discontinuity and fixed endpoints.

    Subclasses supply the two branches on their closed domains; `side`
    arguments select a branch explicitly so one-sided limits at the
    singular point are available as ordinary evaluations.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    @property
    @abstractmethod
    def singular_point(self) -> float: ...

    @abstractmethod
    def branch(self, x: float, side: Side) -> float: ...

    @abstractmethod
    def branch_log_deriv(self, x: float, side: Side) -> float: ...

    @abstractmethod
    def branch_schwarzian(self, x: float, side: Side) -> float: ...

    @property
    def critical_values(self) -> tuple[float, float]:
        c = self.singular_point
        return self.branch(c, Side.LEFT), self.branch(c, Side.RIGHT)

    @property
    def is_nontrivial(self) -> bool:
        c1_minus, c1_plus = self.critical_values
        return c1_plus < self.singular_point < c1_minus

    def branch_domain(self, side: Side) -> tuple[float, float]:
        c = self.singular_point
        return (0.0, c) if side == Side.LEFT else (c, 1.0)

    def branch_range(self, side: Side) -> tuple[float, float]:
        lo, hi = self.branch_domain(side)
        return self.branch(lo, side), self.branch(hi, side)

    def inverse_branch(self, y: float, side: Side) -> float:
        lo, hi = self.branch_domain(side)
        y_lo, y_hi = self.branch_range(side)
        if y < y_lo or y > y_hi:
            raise NoSuchBranch(side.symbol)
        if y == y_lo:
            return lo
        if y == y_hi:
            return hi
        return bisect(
            lambda t: self.branch(t, side) - y,
            lo,
            hi,
            xtol=BISECT_XTOL,
            rtol=BISECT_RTOL,
            maxiter=BISECT_MAXITER,
        )

    def side_of(self, x: float, side: Side | None = None, index: int = 0) -> Side:
        if side is not None:
            return Side(side)
        c = self.singular_point
        if abs(x - c) <= COLLISION_TOL:
            raise SingularPointHit(x, c, index)
        return Side.LEFT if x < c else Side.RIGHT

    def eval(self, x: float, side: Side | None = None) -> float:
        return self.branch(x, self.side_of(x, side))

    def log_deriv(self, x: float, side: Side | None = None) -> float:
        return self.branch_log_deriv(x, self.side_of(x, side))

    def deriv(self, x: float, side: Side | None = None) -> float:
        log_value = self.log_deriv(x, side)
        if log_value == -math.inf:
            return 0.0
        try:
            value = math.exp(log_value)
        except OverflowError:
            return math.inf
        if value == 0.0:
            raise DerivativeUnderflow(log_value)
        return value

    def schwarzian(self, x: float, side: Side | None = None) -> float:
        return self.branch_schwarzian(x, self.side_of(x, side))

    def log_deriv_sum(self, x: float, n: int, side: Side | None = None) -> float:
        terms: list[float] = []
        current = x
        for index in range(n):
            chosen = self.side_of(current, side if index == 0 else None, index)
            terms.append(self.branch_log_deriv(current, chosen))
            current = self.branch(current, chosen)
        return math.fsum(terms)

    def itinerary(self, x: float, n: int, side: Side | None = None) -> ItineraryWord:
        symbols: list[str] = []
        current = x
        for index in range(n):
            try:
                chosen = self.side_of(current, side if index == 0 else None, index)
            except SingularPointHit:
                return ItineraryWord(symbols="".join(symbols), collided=True)
            symbols.append(chosen.symbol)
            current = self.branch(current, chosen)
        return ItineraryWord(symbols="".join(symbols))

    def orbit(self, x: float, n: int, side: Side | None = None) -> Orbit:
        points = [x]
        current = x
        for index in range(n):
            try:
                chosen = self.side_of(current, side if index == 0 else None, index)
            except SingularPointHit:
                return Orbit(np.asarray(points), collision_index=index)
            current = self.branch(current, chosen)
            points.append(current)
        return Orbit(np.asarray(points))

    def orbit_chunks(self, x: float, n: int, chunk: int = 1_000_000) -> Iterator[Orbit]:
        """Yield x_0..x_{n-1} in consecutive chunks; a collision ends the stream."""
        current = x
        remaining = n
        offset = 0
        while remaining > 0:
            size = min(chunk, remaining)
            segment = self.orbit(current, size)
            if segment.truncated:
                index = offset + int(segment.collision_index or 0)
                yield Orbit(segment.points, collision_index=index)
                return
            yield Orbit(segment.points[:-1])
            current = float(segment.points[-1])
            remaining -= size
            offset += size

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        """Natural-branch evaluation of an array; points at c go to the right branch."""
        c = self.singular_point
        return np.asarray([self.branch(float(x), Side.LEFT if x < c else Side.RIGHT) for x in np.ravel(xs)]).reshape(
            np.shape(xs)
        )

    def log_deriv_array(self, xs: np.ndarray) -> np.ndarray:
        c = self.singular_point
        return np.asarray(
            [self.branch_log_deriv(float(x), Side.LEFT if x < c else Side.RIGHT) for x in np.ravel(xs)]
        ).reshape(np.shape(xs))


def iterate_word(lmap: LorenzMap, x: float, word: str) -> float:
    """Apply the branches named by `word` in order, forcing sides at every step."""
    current = x
    for symbol in word:
        current = lmap.branch(current, Side.LEFT if symbol == "0" else Side.RIGHT)
    return current


def log_deriv_along_word(lmap: LorenzMap, x: float, word: str) -> float:
    total = 0.0
    current = x
    for symbol in word:
        side = Side.LEFT if symbol == "0" else Side.RIGHT
        total += lmap.branch_log_deriv(current, side)
        current = lmap.branch(current, side)
    return total
