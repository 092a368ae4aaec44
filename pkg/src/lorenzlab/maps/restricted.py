from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import Field, model_validator

from lorenzlab.errors import MarginTooLarge, NoSuchBranch
from lorenzlab.schemas.common import Side

from .base import LorenzMap
from .standard import StandardFamilyMap


class RestrictedMap(LorenzMap):
    """g = B^-1 ∘ f ∘ B with B(x) = m + (1 - 2m) x.

    The image of g stays a positive distance `epsilon_budget` away from
    {0, 1}, so additive noise up to that amplitude keeps orbits in [0, 1].
    """

    family: Literal["restricted"] = "restricted"
    base: StandardFamilyMap
    margin: float = Field(gt=0.0, lt=0.5)

    @model_validator(mode="after")
    def validate_containment(self) -> RestrictedMap:
        f, m = self.base, self.margin
        if not f.eval(m) > m:
            raise MarginTooLarge(m, f"f(m) = {f.eval(m)!r} is not above m")
        if not f.eval(1.0 - m) < 1.0 - m:
            raise MarginTooLarge(m, f"f(1-m) = {f.eval(1.0 - m)!r} is not below 1-m")
        if self.epsilon_budget <= 0.0:
            raise MarginTooLarge(m, "critical values leave [m, 1-m]")
        return self

    @property
    def scale(self) -> float:
        return 1.0 - 2.0 * self.margin

    def to_base(self, x: float) -> float:
        return self.margin + self.scale * x

    def from_base(self, y: float) -> float:
        return (y - self.margin) / self.scale

    @property
    def singular_point(self) -> float:
        return self.from_base(self.base.c)

    @property
    def epsilon_budget(self) -> float:
        c = self.singular_point
        limits = (
            self.branch(0.0, Side.LEFT),
            self.branch(c, Side.LEFT),
            self.branch(c, Side.RIGHT),
            self.branch(1.0, Side.RIGHT),
        )
        return min(min(value, 1.0 - value) for value in limits)

    def branch(self, x: float, side: Side) -> float:
        return self.from_base(self.base.branch(self.to_base(x), side))

    def branch_log_deriv(self, x: float, side: Side) -> float:
        return self.base.branch_log_deriv(self.to_base(x), side)

    def branch_schwarzian(self, x: float, side: Side) -> float:
        return self.base.branch_schwarzian(self.to_base(x), side) * self.scale * self.scale

    def inverse_branch(self, y: float, side: Side) -> float:
        lo, hi = self.branch_range(side)
        if y < lo or y > hi:
            raise NoSuchBranch(side.symbol)
        if y == lo:
            return self.branch_domain(side)[0]
        if y == hi:
            return self.branch_domain(side)[1]
        return self.from_base(self.base.inverse_branch(self.to_base(y), side))

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        ys = self.base.eval_array(self.margin + self.scale * np.asarray(xs, dtype=float))
        return (ys - self.margin) / self.scale

    def log_deriv_array(self, xs: np.ndarray) -> np.ndarray:
        return self.base.log_deriv_array(self.margin + self.scale * np.asarray(xs, dtype=float))

    def log_deriv_level(self, level: float, side: Side) -> float:
        return self.from_base(self.base.log_deriv_level(level, side))

    def log_deriv_integral(self, lo: float, hi: float, absolute: bool = False) -> float:
        return self.base.log_deriv_integral(self.to_base(lo), self.to_base(hi), absolute) / self.scale


def restrict_rescale(lmap: StandardFamilyMap, margin: float) -> RestrictedMap:
    if margin <= 0.0:
        raise ValueError("margin must be positive; m = 0 leaves no noise budget")
    return RestrictedMap(base=lmap, margin=margin)
