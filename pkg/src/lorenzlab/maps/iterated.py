from __future__ import annotations

import math
from typing import Literal

from pydantic import Field, model_validator

from lorenzlab.schemas.common import Side

from .base import LorenzMap, log_deriv_along_word
from .restricted import RestrictedMap
from .standard import StandardFamilyMap

ClosedFormMap = StandardFamilyMap | RestrictedMap


class IteratedMapDescriptor(LorenzMap):
    """Renormalization A^-1 ∘ Pf ∘ A of a closed-form map, kept as a word pair.

    `window` is C_n in base coordinates. `left_word` and `right_word` are
    the base itineraries of C_n^- and C_n^+ up to their return, so their
    lengths are the return times S_n^- and S_n^+. Branches force the base
    sides along the stored word, which makes the closure of each branch
    evaluable (one-sided limits at c' included).
    """

    family: Literal["iterated"] = "iterated"
    base: ClosedFormMap = Field(discriminator="family")
    window: tuple[float, float]
    left_word: str = Field(pattern=r"^0[01]+$")
    right_word: str = Field(pattern=r"^1[01]+$")
    depth: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def validate_window(self) -> IteratedMapDescriptor:
        p, q = self.window
        c = self.base.singular_point
        if not 0.0 <= p < c < q <= 1.0:
            raise ValueError(f"window {self.window} must contain the singular point {c}")
        return self

    @property
    def left_time(self) -> int:
        return len(self.left_word)

    @property
    def right_time(self) -> int:
        return len(self.right_word)

    @property
    def width(self) -> float:
        return self.window[1] - self.window[0]

    @property
    def singular_point(self) -> float:
        return (self.base.singular_point - self.window[0]) / self.width

    def to_base(self, x: float) -> float:
        return self.window[0] + self.width * x

    def from_base(self, y: float) -> float:
        return (y - self.window[0]) / self.width

    def word(self, side: Side) -> str:
        return self.left_word if side == Side.LEFT else self.right_word

    def branch(self, x: float, side: Side) -> float:
        base = self.base
        y = self.window[0] + self.width * x
        for symbol in self.left_word if side == Side.LEFT else self.right_word:
            y = base.branch(y, Side.LEFT if symbol == "0" else Side.RIGHT)
        return (y - self.window[0]) / self.width

    def branch_log_deriv(self, x: float, side: Side) -> float:
        # affine factors |C| and 1/|C| cancel
        return log_deriv_along_word(self.base, self.to_base(x), self.word(side))

    def branch_schwarzian(self, x: float, side: Side) -> float:
        base = self.base
        y = self.to_base(x)
        log_chain = 0.0
        total = 0.0
        for symbol in self.word(side):
            step_side = Side.LEFT if symbol == "0" else Side.RIGHT
            schwarzian = base.branch_schwarzian(y, step_side)
            if schwarzian == -math.inf:
                return -math.inf
            exponent = 2.0 * log_chain
            total += schwarzian * (math.exp(exponent) if exponent < 700.0 else math.inf)
            log_chain += base.branch_log_deriv(y, step_side)
            y = base.branch(y, step_side)
        return total * self.width * self.width

    def refine(self, window: tuple[float, float], left_word: str, right_word: str) -> IteratedMapDescriptor:
        """Descriptor for a renormalization of this map found in its own coordinates."""
        expand = {"0": self.left_word, "1": self.right_word}
        return IteratedMapDescriptor(
            base=self.base,
            window=(self.to_base(window[0]), self.to_base(window[1])),
            left_word="".join(expand[symbol] for symbol in left_word),
            right_word="".join(expand[symbol] for symbol in right_word),
            depth=self.depth + 1,
        )
