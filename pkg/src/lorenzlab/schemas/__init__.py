from .common import (
    FailureCategory,
    FrozenModel,
    GeometryVerdict,
    KernelShape,
    RenormFailure,
    Side,
    StageName,
    StageStatus,
    StartPoint,
    StrictModel,
)
from .manifest import RunManifest, StageRecord

__all__ = [
    "FailureCategory",
    "FrozenModel",
    "GeometryVerdict",
    "KernelShape",
    "RenormFailure",
    "RunManifest",
    "Side",
    "StageName",
    "StageRecord",
    "StageStatus",
    "StartPoint",
    "StrictModel",
]
