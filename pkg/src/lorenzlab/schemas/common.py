from __future__ import annotations

from enum import IntEnum, StrEnum

from pydantic import BaseModel, ConfigDict


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class FrozenModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Side(IntEnum):
    LEFT = 0
    RIGHT = 1

    @property
    def symbol(self) -> str:
        return str(int(self))


class KernelShape(StrEnum):
    UNIFORM = "uniform"
    TRIANGULAR = "triangular"


class StartPoint(StrEnum):
    C1_MINUS = "c1_minus"
    C1_PLUS = "c1_plus"


class StageName(StrEnum):
    TUNE = "tune"
    LEVELS = "levels"
    GEOMETRY = "geometry"
    MEASURE = "measure"
    RECURRENCE = "recurrence"
    LYAPUNOV = "lyapunov"
    INTEGRABILITY = "integrability"
    STATIONARY = "stationary"
    STABILITY = "stability"
    SHADOW = "shadow"
    RLYAP = "rlyap"


class StageStatus(StrEnum):
    OK = "ok"
    FAILED = "failed"
    SKIPPED = "skipped"


class GeometryVerdict(StrEnum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"


class RenormFailure(StrEnum):
    TRIVIAL_MAP = "trivial_map"
    BRANCH_MISSING = "branch_missing"
    ROOT_MISSING = "root_missing"
    NON_TRIVIALITY = "non_triviality"
    RETURN_CONDITION = "return_condition"
    CONTAINMENT = "containment"
    DISJOINTNESS = "disjointness"
    RESIDUAL = "residual"
    NO_TYPE_WITHIN_BUDGET = "no_type_within_budget"


class FailureCategory(StrEnum):
    SINGULARITY = "singularity"
    DOMAIN = "domain"
    RENORMALIZATION = "renormalization"
    PRECISION = "precision"
    TUNING = "tuning"
    LEVELS = "levels"
    NOISE = "noise"
    CONFIG = "config"
    STAGE = "stage"
