from .branches import find_periodic_boundary, locate_branch, periodic_residual
from .interval import (
    PreRenormalization,
    detect_cascade,
    detect_renormalization,
    detect_type,
    find_renorm_interval,
    monotone_types,
    prerenormalization,
    renormalize,
    residual_tolerance,
)
from .tuner import (
    Rectangle,
    TuningResult,
    certified_depth,
    certify_cascade,
    combinatorics_window,
    detect_certificate,
    tune_parameters,
)
from .types import CombinatorialType, RenormResult

__all__ = [
    "CombinatorialType",
    "PreRenormalization",
    "Rectangle",
    "RenormResult",
    "TuningResult",
    "certified_depth",
    "certify_cascade",
    "combinatorics_window",
    "detect_cascade",
    "detect_certificate",
    "detect_renormalization",
    "detect_type",
    "find_periodic_boundary",
    "find_renorm_interval",
    "locate_branch",
    "monotone_types",
    "periodic_residual",
    "prerenormalization",
    "renormalize",
    "residual_tolerance",
    "tune_parameters",
]
