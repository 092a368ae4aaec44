from __future__ import annotations

import re

from pydantic import Field, model_validator

from lorenzlab.maps.iterated import IteratedMapDescriptor
from lorenzlab.schemas.common import FrozenModel

_MONOTONE_MINUS = re.compile(r"^01+$")
_MONOTONE_PLUS = re.compile(r"^10+$")


class CombinatorialType(FrozenModel):
    omega_minus: str = Field(pattern=r"^0[01]+$")
    omega_plus: str = Field(pattern=r"^1[01]+$")

    @classmethod
    def monotone(cls, a: int, b: int) -> CombinatorialType:
        if a < 1 or b < 1:
            raise ValueError(f"monotone type needs a, b >= 1, got ({a}, {b})")
        return cls(omega_minus="0" + "1" * a, omega_plus="1" + "0" * b)

    @property
    def is_monotone(self) -> bool:
        return bool(_MONOTONE_MINUS.match(self.omega_minus) and _MONOTONE_PLUS.match(self.omega_plus))

    @property
    def a(self) -> int:
        return len(self.omega_minus) - 1

    @property
    def b(self) -> int:
        return len(self.omega_plus) - 1

    @property
    def total_length(self) -> int:
        return len(self.omega_minus) + len(self.omega_plus)

    def label(self) -> str:
        if self.is_monotone:
            return f"({self.a},{self.b})"
        return f"({self.omega_minus},{self.omega_plus})"


class RenormResult(FrozenModel):
    """A certified renormalization window of some map, in that map's coordinates."""

    window: tuple[float, float]
    times: tuple[int, int]
    type: CombinatorialType
    renormalized: IteratedMapDescriptor
    left_residual: float = Field(ge=0.0)
    right_residual: float = Field(ge=0.0)

    @model_validator(mode="after")
    def validate_times(self) -> RenormResult:
        if self.times != (len(self.type.omega_minus), len(self.type.omega_plus)):
            raise ValueError("return times must match the combinatorial words")
        if not self.window[0] < self.window[1]:
            raise ValueError("window must be a nondegenerate interval")
        return self

    @property
    def depth(self) -> int:
        return self.renormalized.depth

    @property
    def base_window(self) -> tuple[float, float]:
        return self.renormalized.window
