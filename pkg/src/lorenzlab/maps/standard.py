from __future__ import annotations

import math
from typing import Literal

import numpy as np
from pydantic import Field, model_validator

from lorenzlab.errors import NoSuchBranch
from lorenzlab.schemas.common import Side

from .base import COLLISION_TOL, LorenzMap, Orbit


class StandardFamilyMap(LorenzMap):
    """Lorenz map with affine coordinate changes around the power-law singularity.

    Left branch  u * (1 - ((c - x) / c) ** alpha)
    Right branch 1 - v * (1 - ((x - c) / (1 - c)) ** alpha)

    Trivial maps (u <= c or 1 - v >= c) are constructible so that the
    renormalization search can report them; `is_nontrivial` tells them apart.
    """

    family: Literal["standard"] = "standard"
    u: float = Field(gt=0.0, le=1.0)
    v: float = Field(gt=0.0, le=1.0)
    c: float = Field(gt=0.0, lt=1.0)
    alpha: float = Field(gt=1.0)

    @model_validator(mode="after")
    def validate_repelling_endpoints(self) -> StandardFamilyMap:
        if self.u * self.alpha / self.c <= 1.0:
            raise ValueError("fixed point 0 must be repelling: u*alpha/c > 1")
        if self.v * self.alpha / (1.0 - self.c) <= 1.0:
            raise ValueError("fixed point 1 must be repelling: v*alpha/(1-c) > 1")
        return self

    @property
    def singular_point(self) -> float:
        return self.c

    @property
    def critical_values(self) -> tuple[float, float]:
        return self.u, 1.0 - self.v

    def branch_range(self, side: Side) -> tuple[float, float]:
        return (0.0, self.u) if side == Side.LEFT else (1.0 - self.v, 1.0)

    def branch(self, x: float, side: Side) -> float:
        if side == Side.LEFT:
            d = (self.c - x) / self.c
            if d < 0.0:
                d = 0.0
            elif d > 1.0:
                d = 1.0
            return self.u * (1.0 - d**self.alpha)
        d = (x - self.c) / (1.0 - self.c)
        if d < 0.0:
            d = 0.0
        elif d > 1.0:
            d = 1.0
        return 1.0 - self.v * (1.0 - d**self.alpha)

    def branch_log_deriv(self, x: float, side: Side) -> float:
        if side == Side.LEFT:
            scale = self.c
            d = (self.c - x) / scale
            amplitude = self.u
        else:
            scale = 1.0 - self.c
            d = (x - self.c) / scale
            amplitude = self.v
        if d <= 0.0:
            return -math.inf
        return math.log(amplitude * self.alpha / scale) + (self.alpha - 1.0) * math.log(d)

    def branch_schwarzian(self, x: float, side: Side) -> float:
        distance = x - self.c
        if distance == 0.0:
            return -math.inf
        return -(self.alpha * self.alpha - 1.0) / (2.0 * distance * distance)

    def inverse_branch(self, y: float, side: Side) -> float:
        lo, hi = self.branch_range(side)
        if y < lo or y > hi:
            raise NoSuchBranch(side.symbol)
        if side == Side.LEFT:
            s = 1.0 - y / self.u
            return self.c - self.c * max(s, 0.0) ** (1.0 / self.alpha)
        s = 1.0 - (1.0 - y) / self.v
        return self.c + (1.0 - self.c) * max(s, 0.0) ** (1.0 / self.alpha)

    def orbit(self, x: float, n: int, side: Side | None = None) -> Orbit:
        u, v, c, alpha = self.u, self.v, self.c, self.alpha
        right_scale = 1.0 - c
        points = [x]
        current = x
        for index in range(n):
            if index == 0 and side is not None:
                chosen = Side(side)
            elif abs(current - c) <= COLLISION_TOL:
                return Orbit(np.asarray(points), collision_index=index)
            else:
                chosen = Side.LEFT if current < c else Side.RIGHT
            if chosen == Side.LEFT:
                d = (c - current) / c
                current = u * (1.0 - (d if d > 0.0 else 0.0) ** alpha)
            else:
                d = (current - c) / right_scale
                current = 1.0 - v * (1.0 - (d if d > 0.0 else 0.0) ** alpha)
            points.append(current)
        return Orbit(np.asarray(points))

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        left = xs < self.c
        d_left = np.clip((self.c - xs) / self.c, 0.0, 1.0)
        d_right = np.clip((xs - self.c) / (1.0 - self.c), 0.0, 1.0)
        return np.where(
            left,
            self.u * (1.0 - d_left**self.alpha),
            1.0 - self.v * (1.0 - d_right**self.alpha),
        )

    def log_deriv_array(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        left = xs < self.c
        scale = np.where(left, self.c, 1.0 - self.c)
        amplitude = np.where(left, self.u, self.v)
        d = np.abs(xs - self.c) / scale
        with np.errstate(divide="ignore"):
            return np.log(amplitude * self.alpha / scale) + (self.alpha - 1.0) * np.log(d)

    def log_deriv_level(self, level: float, side: Side) -> float:
        """Point of the branch where log Df equals `level`."""
        scale = self.c if side == Side.LEFT else 1.0 - self.c
        amplitude = self.u if side == Side.LEFT else self.v
        t = math.exp((level - math.log(amplitude * self.alpha / scale)) / (self.alpha - 1.0))
        t = min(t, 1.0)
        return self.c - scale * t if side == Side.LEFT else self.c + scale * t

    def unit_root(self, side: Side) -> float:
        """Point of the branch where Df = 1."""
        return self.log_deriv_level(0.0, side)

    def log_deriv_integral(self, lo: float, hi: float, absolute: bool = False) -> float:
        """Exact integral of log Df (or |log Df|) over [lo, hi] ⊂ [0, 1]."""
        if hi <= lo:
            return 0.0
        total = 0.0
        pieces = [(lo, min(hi, self.c), Side.LEFT), (max(lo, self.c), hi, Side.RIGHT)]
        for start, stop, side in pieces:
            if stop <= start:
                continue
            if absolute:
                root = self.unit_root(side)
                if start < root < stop:
                    total += abs(self._branch_integral(start, root, side))
                    total += abs(self._branch_integral(root, stop, side))
                else:
                    total += abs(self._branch_integral(start, stop, side))
            else:
                total += self._branch_integral(start, stop, side)
        return total

    def _branch_integral(self, start: float, stop: float, side: Side) -> float:
        scale = self.c if side == Side.LEFT else 1.0 - self.c
        amplitude = self.u if side == Side.LEFT else self.v
        constant = math.log(amplitude * self.alpha / scale)
        power = self.alpha - 1.0

        def primitive(t: float) -> float:
            t = min(max(t, 0.0), 1.0)
            entropy_term = t * math.log(t) - t if t > 0.0 else 0.0
            return constant * t + power * entropy_term

        if side == Side.LEFT:
            return scale * (primitive((self.c - start) / scale) - primitive((self.c - stop) / scale))
        return scale * (primitive((stop - self.c) / scale) - primitive((start - self.c) / scale))
