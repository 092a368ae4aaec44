from __future__ import annotations

from typing import TYPE_CHECKING, Any

from lorenzlab.schemas.common import FailureCategory, RenormFailure

if TYPE_CHECKING:
    from lorenzlab.renorm.types import RenormResult


class LorenzLabError(Exception):
    category: FailureCategory = FailureCategory.DOMAIN


class SingularPointHit(LorenzLabError):
    category = FailureCategory.SINGULARITY

    def __init__(self, x: float, c: float, index: int = 0) -> None:
        super().__init__(f"point {x!r} within collision tolerance of c={c!r} at step {index}")
        self.x = x
        self.c = c
        self.index = index


class DerivativeUnderflow(LorenzLabError):
    category = FailureCategory.PRECISION

    def __init__(self, log_value: float) -> None:
        super().__init__(f"derivative exp({log_value!r}) is below the representable range")
        self.log_value = log_value


class MarginTooLarge(LorenzLabError):
    def __init__(self, margin: float, detail: str) -> None:
        super().__init__(f"margin {margin!r} rejected: {detail}")
        self.margin = margin


class NoSuchBranch(LorenzLabError):
    category = FailureCategory.RENORMALIZATION

    def __init__(self, word: str) -> None:
        super().__init__(f"no branch with itinerary {word!r}")
        self.word = word


class NoRootInBranch(LorenzLabError):
    category = FailureCategory.RENORMALIZATION

    def __init__(self, word: str, detail: str = "constant sign") -> None:
        super().__init__(f"no periodic point on branch {word!r}: {detail}")
        self.word = word


class NotRenormalizable(LorenzLabError):
    category = FailureCategory.RENORMALIZATION

    def __init__(self, reason: RenormFailure, detail: str = "", attempts: dict[str, str] | None = None) -> None:
        message = reason.value if not detail else f"{reason.value}: {detail}"
        super().__init__(message)
        self.reason = reason
        self.detail = detail
        self.attempts = attempts or {}


class DegenerateWindow(LorenzLabError):
    category = FailureCategory.PRECISION

    def __init__(self, width: float, cap: float) -> None:
        super().__init__(f"window width {width!r} below precision cap {cap!r}")
        self.width = width


class PrecisionCapExceeded(LorenzLabError):
    category = FailureCategory.PRECISION

    def __init__(self, depth: int, width: float) -> None:
        super().__init__(f"|C_{depth}| = {width!r} is below the precision cap")
        self.depth = depth
        self.width = width


class TuningFailed(LorenzLabError):
    category = FailureCategory.TUNING

    def __init__(
        self,
        depth: int,
        cascade: list[RenormResult] | None = None,
        parameters: tuple[float, float] | None = None,
        certifications: int = 0,
    ) -> None:
        super().__init__(f"tuning stopped at depth {depth} after {certifications} certifications")
        self.depth = depth
        self.cascade = cascade or []
        self.parameters = parameters
        self.certifications = certifications


class LevelAuditFailed(LorenzLabError):
    category = FailureCategory.LEVELS

    def __init__(self, depth: int, detail: str) -> None:
        super().__init__(f"level {depth}: {detail}")
        self.depth = depth


class NotMonotone(LorenzLabError):
    category = FailureCategory.LEVELS


class CollisionAbort(LorenzLabError):
    category = FailureCategory.SINGULARITY

    def __init__(self, index: int, partial: Any = None) -> None:
        super().__init__(f"orbit collided with the singular point at step {index}")
        self.index = index
        self.partial = partial


class EpsilonExceedsBudget(LorenzLabError):
    category = FailureCategory.NOISE

    def __init__(self, epsilon: float, budget: float) -> None:
        super().__init__(f"noise amplitude {epsilon!r} exceeds the budget {budget!r}")
        self.epsilon = epsilon
        self.budget = budget


class GridTooCoarse(LorenzLabError):
    category = FailureCategory.NOISE

    def __init__(self, width: float, epsilon: float) -> None:
        super().__init__(f"bin width {width!r} does not resolve noise {epsilon!r} (need w <= eps/5)")
        self.width = width
        self.epsilon = epsilon


class ConfigInvalid(LorenzLabError):
    category = FailureCategory.CONFIG


class StageFailed(LorenzLabError):
    category = FailureCategory.STAGE

    def __init__(self, stage: str, diagnostic: str) -> None:
        super().__init__(f"stage {stage} failed: {diagnostic}")
        self.stage = stage
        self.diagnostic = diagnostic
